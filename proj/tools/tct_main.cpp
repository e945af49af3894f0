#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tct/ahp.hpp"
#include "tct/core.hpp"
#include "tct/errors.hpp"
#include "tct/experiment.hpp"
#include "tct/instance_io.hpp"
#include "tct/moea.hpp"
#include "tct/portfolio.hpp"
#include "tct/quality.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve_instance(const std::string& name) {
  fs::path p = name;
  if (fs::exists(p)) return p;
  if (const char* dir = std::getenv("TCT_INSTANCE_DIR")) {
    fs::path candidate = fs::path(dir) / p;
    if (fs::exists(candidate)) return candidate;
  }
  throw tct::ValidationError("instance file not found: " + name);
}

tct::Assignment parse_modes_arg(const std::string& text) {
  tct::Assignment a;
  std::string token;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      if (!token.empty()) a.modes.push_back(std::stoi(token));
      token.clear();
    } else {
      token += text[i];
    }
  }
  return a;
}

void emit(const std::string& text, const std::optional<std::string>& out_file) {
  if (out_file) {
    std::ofstream out(*out_file, std::ios::binary);
    if (!out) throw tct::Error("cannot write " + *out_file);
    out << text;
  } else {
    std::cout << text;
  }
}

struct RankInput {
  std::vector<std::string> alternatives;
  std::vector<std::string> attributes;
  std::vector<std::vector<tct::ahp::Decimal>> values;
};

RankInput read_rank_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw tct::ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "alternative,attribute,obj_value")
    throw tct::ValidationError(path.string() +
                               ": expected header 'alternative,attribute,obj_value'");
  RankInput r;
  std::vector<std::tuple<std::string, std::string, tct::ahp::Decimal>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string alt, attr, value;
    if (!std::getline(ls, alt, ',') || !std::getline(ls, attr, ',') || !std::getline(ls, value))
      throw tct::ValidationError(path.string() + ":" + std::to_string(lineno) + ": bad row");
    rows.emplace_back(alt, attr, tct::ahp::Decimal::parse(value));
  }
  for (const auto& [alt, attr, v] : rows) {
    if (std::find(r.alternatives.begin(), r.alternatives.end(), alt) == r.alternatives.end())
      r.alternatives.push_back(alt);
    if (std::find(r.attributes.begin(), r.attributes.end(), attr) == r.attributes.end())
      r.attributes.push_back(attr);
  }
  r.values.assign(r.alternatives.size(),
                  std::vector<tct::ahp::Decimal>(r.attributes.size(), tct::ahp::Decimal{0}));
  for (const auto& [alt, attr, v] : rows) {
    const auto i = static_cast<std::size_t>(
        std::find(r.alternatives.begin(), r.alternatives.end(), alt) - r.alternatives.begin());
    const auto j = static_cast<std::size_t>(
        std::find(r.attributes.begin(), r.attributes.end(), attr) - r.attributes.begin());
    if (r.values[i][j].nanos != 0)
      throw tct::ValidationError(path.string() + ": duplicate row for (" + alt + ", " + attr +
                                 ")");
    r.values[i][j] = v;
  }
  for (std::size_t i = 0; i < r.alternatives.size(); ++i)
    for (std::size_t j = 0; j < r.attributes.size(); ++j)
      if (r.values[i][j].nanos == 0)
        throw tct::ValidationError(path.string() + ": missing row for (" + r.alternatives[i] +
                                   ", " + r.attributes[j] + ")");
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete time-cost trade-off portfolio solver"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  bool use_json = false;
  std::optional<std::string> out_path;
  int workers = 0;
  std::uint64_t seed = 1;
  app.add_flag("--json", use_json, "machine-readable output");
  app.add_option("--out", out_path, "output file or directory");
  app.add_option("--workers", workers, "cap on concurrent portfolio workers");
  app.add_option("--seed", seed, "random seed");

  std::string instance_arg, modes_arg, alg_arg, config_arg, record_arg, weights_arg;

  auto* cmd_eval = app.add_subcommand("eval", "evaluate one assignment");
  cmd_eval->add_option("instance", instance_arg)->required();
  cmd_eval->add_option("--modes", modes_arg, "comma-separated mode indices")->required();

  auto* cmd_paths = app.add_subcommand("paths", "enumerate source-to-sink paths");
  cmd_paths->add_option("instance", instance_arg)->required();
  bool list_paths = false;
  std::size_t path_cap = 100000;
  cmd_paths->add_flag("--list", list_paths, "print every path");
  cmd_paths->add_option("--cap", path_cap, "enumeration cap");

  auto* cmd_count = app.add_subcommand("count", "count possible schedules");
  cmd_count->add_option("instance", instance_arg)->required();
  bool verify_manifest = false;
  cmd_count->add_flag("--verify", verify_manifest, "compare against the manifest sidecar");

  auto* cmd_pareto = app.add_subcommand("pareto", "emit a Pareto archive as CSV");
  cmd_pareto->add_option("instance", instance_arg)->required();
  bool exact = false;
  cmd_pareto->add_flag("--exact", exact, "exhaustive oracle (enumerable instances only)");
  cmd_pareto->add_option("--alg", alg_arg, "algorithm: nsga2|spea2|npga2|paes");
  std::uint64_t sweep_cap = 2000000;
  cmd_pareto->add_option("--cap", sweep_cap, "schedule cap for --exact");

  auto* cmd_gen = app.add_subcommand("gen", "generate a random instance");
  int gen_n = 10, gen_min_modes = 2, gen_max_modes = 4;
  double gen_density = 0.3;
  std::string gen_out;
  cmd_gen->add_option("--n", gen_n, "activity count")->required();
  cmd_gen->add_option("--min-modes", gen_min_modes);
  cmd_gen->add_option("--max-modes", gen_max_modes);
  cmd_gen->add_option("--density", gen_density, "forward edge probability");
  cmd_gen->add_option("--file", gen_out, "output instance path")->required();

  auto* cmd_run = app.add_subcommand("run", "run one algorithm on an instance");
  cmd_run->add_option("instance", instance_arg)->required();
  cmd_run->add_option("--alg", alg_arg)->required();
  tct::moea::AlgorithmParams run_params;
  cmd_run->add_option("--population", run_params.population_size);
  cmd_run->add_option("--archive", run_params.archive_size);
  cmd_run->add_option("--generations", run_params.max_generations);
  cmd_run->add_option("--crossover", run_params.crossover_rate);
  cmd_run->add_option("--mutation", run_params.mutation_rate);
  double target_aq_factor = 0.0;
  cmd_run->add_option("--stop-within", target_aq_factor,
                      "stop once AQ is within this fraction of the exact-front AQ");

  auto* cmd_experiment = app.add_subcommand("experiment", "run a configured batch experiment");
  cmd_experiment->add_option("--config", config_arg)->required();

  auto* cmd_stats = app.add_subcommand("stats", "statistics of a run record CSV");
  cmd_stats->add_option("record", record_arg)->required();

  auto* cmd_rank = app.add_subcommand("rank", "AHP rank of portfolio alternatives");
  cmd_rank->add_option("input", record_arg)->required();
  cmd_rank->add_option("--weights", weights_arg, "comma-separated attribute weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(cmd_eval)) {
      const tct::ProjectNetwork network = tct::load_instance(resolve_instance(instance_arg));
      const tct::Assignment a = parse_modes_arg(modes_arg);
      const tct::ObjectivePoint z = tct::evaluate(network, a);
      if (use_json) {
        json j{{"duration", z.duration},
               {"total_cost", z.total_cost.str()},
               {"feasible_time", z.feasible_time},
               {"feasible_cost", z.feasible_cost}};
        emit(j.dump(2) + "\n", out_path);
      } else {
        std::ostringstream out;
        out << "duration " << z.duration << "\n"
            << "total_cost " << z.total_cost.str() << "\n"
            << "feasible_time " << (z.feasible_time ? "true" : "false") << "\n"
            << "feasible_cost " << (z.feasible_cost ? "true" : "false") << "\n";
        emit(out.str(), out_path);
      }
      return 0;
    }

    if (app.got_subcommand(cmd_paths)) {
      const tct::ProjectNetwork network = tct::load_instance(resolve_instance(instance_arg));
      const auto paths = tct::enumerate_paths(network, path_cap);
      if (use_json) {
        json j{{"count", paths.size()}};
        if (list_paths) {
          auto arr = json::array();
          for (const auto& p : paths) arr.push_back(p);
          j["paths"] = arr;
        }
        emit(j.dump(2) + "\n", out_path);
      } else {
        std::ostringstream out;
        out << paths.size() << "\n";
        if (list_paths)
          for (const auto& p : paths) {
            for (std::size_t i = 0; i < p.size(); ++i) out << (i ? "-" : "") << p[i];
            out << "\n";
          }
        emit(out.str(), out_path);
      }
      return 0;
    }

    if (app.got_subcommand(cmd_count)) {
      const fs::path path = resolve_instance(instance_arg);
      const tct::ProjectNetwork network = tct::load_instance(path);
      const tct::BigInt schedules = tct::count_schedules(network);
      if (verify_manifest) {
        const auto manifest = tct::load_manifest(path);
        if (!manifest) throw tct::ValidationError("no manifest next to " + path.string());
        if (manifest->schedules != schedules || manifest->paths != tct::count_paths(network)) {
          std::cerr << "manifest mismatch for " << path.string() << "\n";
          return 1;
        }
      }
      if (use_json)
        emit(json{{"schedules", schedules.str()}}.dump(2) + "\n", out_path);
      else
        emit(schedules.str() + "\n", out_path);
      return 0;
    }

    if (app.got_subcommand(cmd_pareto)) {
      const tct::ProjectNetwork network = tct::load_instance(resolve_instance(instance_arg));
      if (exact == !alg_arg.empty())
        throw tct::ValidationError("pareto needs exactly one of --exact or --alg");
      if (exact) {
        emit(tct::archive_csv(tct::brute_force_pareto(network, sweep_cap)), out_path);
        return 0;
      }
      const auto alg = tct::moea::parse_algorithm(alg_arg);
      if (!alg) throw tct::ValidationError("unknown algorithm '" + alg_arg + "'");
      tct::moea::AlgorithmParams params;
      params.seed = seed;
      const tct::moea::RunResult result = tct::moea::run_algorithm(*alg, network, params);
      const auto frame = tct::quality::ideal_point_estimate(network);
      const auto weights = tct::quality::weight_vectors(2, 50);
      const double aq = tct::quality::average_quality(result.archive, frame, weights);
      emit(tct::archive_csv(result.archive), out_path);
      std::cerr << "AQ " << aq << " after " << result.generations << " generations\n";
      return 0;
    }

    if (app.got_subcommand(cmd_gen)) {
      tct::GeneratorParams params;
      params.n_activities = gen_n;
      params.min_modes = gen_min_modes;
      params.max_modes = gen_max_modes;
      params.density = gen_density;
      params.seed = seed;
      const tct::ProjectNetwork network = tct::generate_instance(params);
      tct::save_instance(network, gen_out);
      tct::save_manifest(network, gen_out);
      std::cerr << "wrote " << gen_out << " (" << network.size() << " activities, "
                << tct::count_schedules(network).str() << " schedules, "
                << tct::count_paths(network) << " paths)\n";
      return 0;
    }

    if (app.got_subcommand(cmd_run)) {
      const tct::ProjectNetwork network = tct::load_instance(resolve_instance(instance_arg));
      const auto alg = tct::moea::parse_algorithm(alg_arg);
      if (!alg) throw tct::ValidationError("unknown algorithm '" + alg_arg + "'");
      run_params.seed = seed;
      const auto frame = tct::quality::ideal_point_estimate(network);
      const auto weights = tct::quality::weight_vectors(2, 50);

      tct::moea::StopHook hook;
      if (target_aq_factor > 0.0) {
        const double best =
            tct::quality::average_quality(tct::brute_force_pareto(network), frame, weights);
        const double threshold = (1.0 + target_aq_factor) * best;
        hook = [&, threshold](std::span<const tct::moea::Individual> front, int) {
          return tct::quality::average_quality(tct::moea::to_archive(front), frame, weights) <=
                 threshold;
        };
      }
      const tct::moea::RunResult result =
          tct::moea::run_algorithm(*alg, network, run_params, hook);
      const double aq = tct::quality::average_quality(result.archive, frame, weights);
      if (use_json) {
        json j{{"algorithm", std::string(tct::moea::to_string(*alg))},
               {"generations", result.generations},
               {"aq", aq},
               {"archive_size", result.archive.size()}};
        emit(j.dump(2) + "\n", out_path);
      } else {
        std::ostringstream out;
        out << "generations " << result.generations << "\n"
            << "aq " << aq << "\n"
            << tct::archive_csv(result.archive);
        emit(out.str(), out_path);
      }
      return 0;
    }

    if (app.got_subcommand(cmd_experiment)) {
      const char* instance_dir = std::getenv("TCT_INSTANCE_DIR");
      tct::experiment::Config config = tct::experiment::Config::parse_file(
          config_arg, instance_dir ? fs::path(instance_dir) : fs::path{});
      if (out_path) config.out_dir = *out_path;
      if (workers > 0) config.workers = workers;
      return tct::experiment::run(config, std::cerr);
    }

    if (app.got_subcommand(cmd_stats)) {
      std::ifstream in(record_arg);
      if (!in) throw tct::ValidationError("cannot open " + record_arg);
      std::string line;
      if (!std::getline(in, line) || line != "trial,iterations,censored")
        throw tct::ValidationError(record_arg + ": expected header 'trial,iterations,censored'");
      tct::portfolio::RunRecord record;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string trial, iters, censored;
        if (!std::getline(ls, trial, ',') || !std::getline(ls, iters, ',') ||
            !std::getline(ls, censored))
          throw tct::ValidationError(record_arg + ": bad row '" + line + "'");
        record.trial_iterations.push_back(std::stoi(iters));
        record.censored.push_back(censored == "1" || censored == "true");
      }
      const tct::portfolio::TrialStats stats = tct::portfolio::trial_statistics(record);
      if (use_json)
        emit(stats.to_json(), out_path);
      else
        emit(stats.stats_csv() + stats.cdf_csv(), out_path);
      return 0;
    }

    if (app.got_subcommand(cmd_rank)) {
      const RankInput input = read_rank_input(record_arg);
      const tct::ahp::DecisionMatrix matrix(input.alternatives, input.attributes, input.values);
      std::optional<std::vector<double>> weights;
      if (!weights_arg.empty()) {
        std::vector<double> w;
        std::string token;
        for (std::size_t i = 0; i <= weights_arg.size(); ++i) {
          if (i == weights_arg.size() || weights_arg[i] == ',') {
            if (!token.empty()) w.push_back(std::stod(token));
            token.clear();
          } else {
            token += weights_arg[i];
          }
        }
        weights = std::move(w);
      }
      const tct::ahp::RankVector ranks = tct::ahp::rank_alternatives(matrix, weights);
      if (use_json)
        emit(tct::ahp::rank_audit_json(matrix, ranks), out_path);
      else
        emit(ranks.to_csv(input.alternatives), out_path);
      return 0;
    }

    throw tct::ValidationError("no subcommand given");
  } catch (const tct::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tct::CapExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
