#include "tct/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "tct/ahp.hpp"
#include "tct/errors.hpp"
#include "tct/instance_io.hpp"

namespace tct::experiment {

namespace {

std::string strip(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string token;
  for (char c : s) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else {
      token += c;
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw ValidationError(origin + ":" + std::to_string(line) + ": " + what);
}

long parse_long(const std::string& v, const std::string& origin, int line) {
  try {
    std::size_t pos = 0;
    long out = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    fail(origin, line, "bad integer '" + v + "'");
  }
}

double parse_real(const std::string& v, const std::string& origin, int line) {
  try {
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    fail(origin, line, "bad number '" + v + "'");
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin,
                     const std::filesystem::path& instance_dir) {
  Config cfg;
  cfg.source_text = text;
  std::string section;
  std::string assignments_value = "all";

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::string line = strip(raw);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = strip(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value'");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));

    if (section == "experiment") {
      if (key == "out") cfg.out_dir = value;
      else if (key == "trials") cfg.trials = static_cast<int>(parse_long(value, origin, lineno));
      else if (key == "slack") cfg.slack = parse_real(value, origin, lineno);
      else if (key == "seed_base")
        cfg.seed_base = static_cast<std::uint64_t>(parse_long(value, origin, lineno));
      else if (key == "calibration_trials")
        cfg.calibration_trials = static_cast<int>(parse_long(value, origin, lineno));
      else if (key == "workers")
        cfg.workers = static_cast<int>(parse_long(value, origin, lineno));
      else fail(origin, lineno, "unknown experiment key '" + key + "'");
    } else if (section == "instances") {
      if (key != "instance") fail(origin, lineno, "unknown instances key '" + key + "'");
      std::filesystem::path p = value;
      if (p.is_relative() && !instance_dir.empty() && std::filesystem::exists(instance_dir / p))
        p = instance_dir / p;
      cfg.instances.push_back(p);
    } else if (section == "roster") {
      if (key == "algorithms") {
        for (const std::string& name : split_list(value)) {
          const auto id = moea::parse_algorithm(name);
          if (!id) fail(origin, lineno, "unknown algorithm '" + name + "'");
          cfg.roster.push_back(*id);
        }
      } else if (key == "processors") {
        cfg.processors = static_cast<int>(parse_long(value, origin, lineno));
      } else if (key == "assignments") {
        assignments_value = value;
      } else {
        fail(origin, lineno, "unknown roster key '" + key + "'");
      }
    } else if (section == "params") {
      if (key == "population")
        cfg.params.population_size = static_cast<int>(parse_long(value, origin, lineno));
      else if (key == "archive")
        cfg.params.archive_size = static_cast<int>(parse_long(value, origin, lineno));
      else if (key == "crossover") cfg.params.crossover_rate = parse_real(value, origin, lineno);
      else if (key == "mutation") cfg.params.mutation_rate = parse_real(value, origin, lineno);
      else if (key == "max_generations")
        cfg.params.max_generations = static_cast<int>(parse_long(value, origin, lineno));
      else if (key == "paes_grid_depth")
        cfg.params.paes_grid_depth = static_cast<int>(parse_long(value, origin, lineno));
      else if (key == "npga2_comparison_set")
        cfg.params.npga2_comparison_set = static_cast<int>(parse_long(value, origin, lineno));
      else if (key == "npga2_sigma_share")
        cfg.params.npga2_sigma_share = parse_real(value, origin, lineno);
      else fail(origin, lineno, "unknown params key '" + key + "'");
    } else if (section.empty()) {
      fail(origin, lineno, "key outside any [section]");
    } else {
      fail(origin, lineno, "unknown section '" + section + "'");
    }
  }

  if (cfg.roster.empty())
    throw ValidationError(origin + ": [roster] algorithms is required");
  if (strip(assignments_value) != "all") {
    std::vector<portfolio::PortfolioAssignment> list;
    for (const std::string& token : split_list(assignments_value))
      list.push_back(portfolio::PortfolioAssignment::parse(token));
    cfg.assignments = portfolio::restrict_assignments(
        list, static_cast<int>(cfg.roster.size()), cfg.processors);
  }
  cfg.params.seed = cfg.seed_base;
  cfg.validate();
  return cfg;
}

Config Config::parse_file(const std::filesystem::path& path,
                          const std::filesystem::path& instance_dir) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string(), instance_dir);
}

void Config::validate() const {
  if (trials < 1) throw ValidationError("trials must be at least 1");
  if (!(slack > 0.0)) throw ValidationError("slack must be positive");
  if (processors < 1) throw ValidationError("processors must be at least 1");
  if (calibration_trials < 1) throw ValidationError("calibration_trials must be at least 1");
  if (instances.empty()) throw ValidationError("at least one instance is required");
  for (const auto& p : instances)
    if (!std::filesystem::exists(p))
      throw ValidationError("instance file does not exist: " + p.string());
  params.validate();
}

int run(const Config& config, std::ostream& log, const portfolio::PortfolioOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  write_file(config.out_dir / "config.txt", config.source_text);

  const std::vector<portfolio::PortfolioAssignment> assignments =
      config.assignments.empty()
          ? portfolio::enumerate_assignments(static_cast<int>(config.roster.size()),
                                             config.processors)
          : config.assignments;

  const quality::WeightVectorSet weights = quality::weight_vectors(2, 50);

  portfolio::PortfolioOptions run_options = options;
  if (run_options.threads <= 0)
    run_options.threads = config.workers > 0 ? config.workers : config.processors;

  // mean iterations per (assignment, instance) for the rank stage
  std::vector<std::string> attribute_labels;
  std::vector<std::vector<ahp::Decimal>> objective(assignments.size());
  bool any_failed = false;
  bool ranks_possible = true;

  for (const fs::path& instance_path : config.instances) {
    const std::string stem = instance_path.stem().string();
    try {
      const ProjectNetwork network = load_instance(instance_path);
      const fs::path instance_dir = config.out_dir / stem;
      fs::create_directories(instance_dir);

      const quality::ReferenceFrame frame = quality::ideal_point_estimate(network);
      write_file(instance_dir / "frame.json", frame.to_json(weights.sampling_parameter()));

      portfolio::TerminationRule rule;
      rule.slack = config.slack;
      rule.max_generations = config.params.max_generations;
      rule.best_aq = portfolio::calibrate_best_aq(network, config.roster, config.params,
                                                  config.calibration_trials, frame, weights);
      log << "instance " << stem << ": best AQ " << rule.best_aq << "\n";

      std::vector<ahp::Decimal> means(assignments.size());
      bool all_means_defined = true;
      for (std::size_t a = 0; a < assignments.size(); ++a) {
        const auto& assignment = assignments[a];
        const portfolio::RunRecord record =
            portfolio::run_portfolio(assignment, config.roster, network, config.params, rule,
                                     config.trials, config.seed_base, frame, weights,
                                     run_options);
        const portfolio::TrialStats stats = portfolio::trial_statistics(record);

        const fs::path adir = instance_dir / assignment.directory_name();
        fs::create_directories(adir);
        write_file(adir / "record.csv", record.to_csv());
        write_file(adir / "stats.csv", stats.stats_csv());
        write_file(adir / "cdf.csv", stats.cdf_csv());

        log << "  " << assignment.label() << ": ";
        if (stats.mean_defined)
          log << "mean " << stats.mean << ", variance " << stats.variance << ", censored "
              << stats.censored_count << "/" << stats.total_trials << "\n";
        else
          log << "all trials censored\n";

        if (stats.mean_defined && stats.mean > 0.0) {
          means[a] = ahp::Decimal::from_double(stats.mean);
        } else {
          all_means_defined = false;
        }
      }
      if (all_means_defined) {
        attribute_labels.push_back(stem);
        for (std::size_t a = 0; a < assignments.size(); ++a)
          objective[a].push_back(means[a]);
      } else {
        ranks_possible = false;
        log << "  note: undefined means; instance left out of the rank stage\n";
      }
    } catch (const std::exception& e) {
      any_failed = true;
      log << "instance " << stem << " failed: " << e.what() << "\n";
    }
  }

  // Rank stage: alternatives are assignments, attributes are instances.
  std::vector<std::string> alternative_labels;
  alternative_labels.reserve(assignments.size());
  for (const auto& a : assignments) alternative_labels.push_back(a.label());

  if (!attribute_labels.empty()) {
    std::string ahp_input = "alternative,attribute,obj_value\n";
    for (std::size_t a = 0; a < assignments.size(); ++a)
      for (std::size_t i = 0; i < attribute_labels.size(); ++i)
        ahp_input += alternative_labels[a] + "," + attribute_labels[i] + "," +
                     objective[a][i].str() + "\n";
    write_file(config.out_dir / "ahp_input.csv", ahp_input);

    if (ranks_possible && assignments.size() >= 2) {
      const ahp::DecisionMatrix matrix(alternative_labels, attribute_labels, objective);
      const ahp::RankVector ranks = ahp::rank_alternatives(matrix);
      write_file(config.out_dir / "ranks.csv", ranks.to_csv(alternative_labels));
      write_file(config.out_dir / "ranks_audit.json", ahp::rank_audit_json(matrix, ranks));
    }
  }

  return any_failed ? 1 : 0;
}

}  // namespace tct::experiment
