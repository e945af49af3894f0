#include "tct/instance_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "tct/errors.hpp"
#include "tct/rng.hpp"

namespace tct {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw ValidationError(origin + ":" + std::to_string(line) + ": " + what);
}

std::string strip(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

int parse_int(const std::string& s, const std::string& origin, int line,
              const std::string& what) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    fail(origin, line, "bad " + what + " '" + s + "'");
  }
}

Money parse_money(const std::string& s, const std::string& origin, int line,
                  const std::string& what) {
  try {
    return Money::parse(s);
  } catch (const ValidationError& e) {
    fail(origin, line, "bad " + what + ": " + e.what());
  }
}

// Modes look like (dur,cost) or (dur,cost,material,rate); entries separated
// by ';'.
std::vector<ExecutionMode> parse_modes(const std::string& text, const std::string& origin,
                                       int line) {
  std::vector<ExecutionMode> modes;
  for (const std::string& part : split(text, ';')) {
    std::string p = strip(part);
    if (p.size() < 2 || p.front() != '(' || p.back() != ')')
      fail(origin, line, "mode '" + p + "' is not parenthesized");
    auto fields = split(p.substr(1, p.size() - 2), ',');
    if (fields.size() != 2 && fields.size() != 4)
      fail(origin, line, "mode '" + p + "' must have 2 or 4 fields");
    ExecutionMode m;
    m.duration = parse_int(strip(fields[0]), origin, line, "duration");
    if (m.duration < 0) fail(origin, line, "negative duration in mode '" + p + "'");
    m.direct_cost = parse_money(strip(fields[1]), origin, line, "cost");
    if (m.direct_cost.cents() < 0) fail(origin, line, "negative cost in mode '" + p + "'");
    if (fields.size() == 4) {
      m.has_decomposition = true;
      m.material_cost = parse_money(strip(fields[2]), origin, line, "material cost");
      m.daily_rate = parse_money(strip(fields[3]), origin, line, "daily rate");
      if (m.material_cost.cents() < 0 || m.daily_rate.cents() < 0)
        fail(origin, line, "negative cost decomposition in mode '" + p + "'");
      if (m.material_cost + m.daily_rate * m.duration != m.direct_cost)
        fail(origin, line,
             "mode '" + p + "': cost does not equal material plus duration times daily rate");
    }
    modes.push_back(m);
  }
  return modes;
}

}  // namespace

ProjectNetwork parse_instance(const std::string& text, const std::string& origin) {
  std::optional<int> declared_n;
  std::optional<Money> indirect;
  std::optional<int> t_max;
  std::optional<Money> c_max;
  bool t_max_seen = false, c_max_seen = false;
  std::vector<std::pair<int, Activity>> acts;  // (line, activity)

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::string line = strip(raw);
    if (line.empty()) continue;

    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "N") {
      std::string v;
      ls >> v;
      declared_n = parse_int(v, origin, lineno, "activity count");
    } else if (key == "IC") {
      std::string v;
      ls >> v;
      indirect = parse_money(v, origin, lineno, "indirect rate");
    } else if (key == "TMAX") {
      std::string v;
      ls >> v;
      t_max_seen = true;
      if (v != "INF") t_max = parse_int(v, origin, lineno, "TMAX");
    } else if (key == "CMAX") {
      std::string v;
      ls >> v;
      c_max_seen = true;
      if (v != "INF") c_max = parse_money(v, origin, lineno, "CMAX");
    } else if (key == "ACT") {
      Activity act;
      std::string id_s, succ_kw, succ_s, modes_kw;
      ls >> id_s >> succ_kw >> succ_s >> modes_kw;
      if (succ_kw != "SUCC" || modes_kw != "MODES")
        fail(origin, lineno, "expected 'ACT <id> SUCC <ids|-> MODES <modes>'");
      act.id = parse_int(id_s, origin, lineno, "activity id");
      if (succ_s != "-")
        for (const std::string& s : split(succ_s, ','))
          act.successors.push_back(parse_int(strip(s), origin, lineno, "successor id"));
      std::string rest;
      std::getline(ls, rest);
      rest = strip(rest);
      if (rest.empty()) fail(origin, lineno, "activity has no modes");
      act.modes = parse_modes(rest, origin, lineno);
      acts.emplace_back(lineno, std::move(act));
    } else {
      fail(origin, lineno, "unknown directive '" + key + "'");
    }
  }

  if (!declared_n) fail(origin, lineno, "missing N header");
  if (!indirect) fail(origin, lineno, "missing IC header");
  if (!t_max_seen) fail(origin, lineno, "missing TMAX header");
  if (!c_max_seen) fail(origin, lineno, "missing CMAX header");
  if (static_cast<int>(acts.size()) != *declared_n)
    fail(origin, lineno,
         "N declares " + std::to_string(*declared_n) + " activities but " +
             std::to_string(acts.size()) + " ACT lines found");

  std::sort(acts.begin(), acts.end(),
            [](const auto& a, const auto& b) { return a.second.id < b.second.id; });
  const int n = *declared_n;
  std::vector<int> act_line(n + 1, 0);
  std::vector<Activity> activities;
  activities.reserve(acts.size());
  for (auto& [line, act] : acts) {
    if (act.id < 1 || act.id > n)
      fail(origin, line, "activity id " + std::to_string(act.id) + " outside 1.." +
                             std::to_string(n));
    if (!activities.empty() && activities.back().id == act.id)
      fail(origin, line, "duplicate activity id " + std::to_string(act.id));
    act_line[act.id] = line;
    activities.push_back(std::move(act));
  }

  // Successor and cycle diagnostics carry the line of the offending ACT.
  for (const Activity& act : activities) {
    for (int s : act.successors) {
      if (s == act.id)
        fail(origin, act_line[act.id],
             "activity " + std::to_string(act.id) + " lists itself as successor");
      if (s < 1 || s > n)
        fail(origin, act_line[act.id],
             "dangling successor id " + std::to_string(s) + " (activities are 1.." +
                 std::to_string(n) + ")");
    }
  }
  {
    std::vector<int> indegree(n, 0);
    for (const Activity& act : activities)
      for (int s : act.successors) ++indegree[s - 1];
    std::vector<int> ready;
    for (int i = 0; i < n; ++i)
      if (indegree[i] == 0) ready.push_back(i);
    int removed = 0;
    while (!ready.empty()) {
      int i = ready.back();
      ready.pop_back();
      ++removed;
      for (int s : activities[i].successors)
        if (--indegree[s - 1] == 0) ready.push_back(s - 1);
    }
    if (removed != n) {
      int culprit = 0;
      for (int i = 0; i < n; ++i)
        if (indegree[i] > 0) {
          culprit = i + 1;
          break;
        }
      fail(origin, act_line[culprit],
           "precedence cycle involving activity " + std::to_string(culprit));
    }
  }

  try {
    return ProjectNetwork(std::move(activities), *indirect, t_max, c_max);
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

ProjectNetwork load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), path.string());
}

std::string format_instance(const ProjectNetwork& network) {
  std::ostringstream out;
  out << "N " << network.size() << "\n";
  out << "IC " << network.indirect_rate().str() << "\n";
  out << "TMAX " << (network.t_max() ? std::to_string(*network.t_max()) : "INF") << "\n";
  out << "CMAX " << (network.c_max() ? network.c_max()->str() : "INF") << "\n";
  for (const Activity& act : network.activities()) {
    out << "ACT " << act.id << " SUCC ";
    if (act.successors.empty()) {
      out << "-";
    } else {
      for (std::size_t i = 0; i < act.successors.size(); ++i)
        out << (i ? "," : "") << act.successors[i];
    }
    out << " MODES ";
    for (std::size_t i = 0; i < act.modes.size(); ++i) {
      const ExecutionMode& m = act.modes[i];
      out << (i ? ";" : "") << "(" << m.duration << "," << m.direct_cost.str();
      if (m.has_decomposition)
        out << "," << m.material_cost.str() << "," << m.daily_rate.str();
      out << ")";
    }
    out << "\n";
  }
  return out.str();
}

void save_instance(const ProjectNetwork& network, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write instance file " + path.string());
  out << format_instance(network);
}

std::filesystem::path manifest_path_for(const std::filesystem::path& instance_path) {
  std::filesystem::path p = instance_path;
  p.replace_extension(".manifest");
  return p;
}

std::optional<Manifest> load_manifest(const std::filesystem::path& instance_path) {
  std::ifstream in(manifest_path_for(instance_path));
  if (!in) return std::nullopt;
  Manifest m;
  std::string key;
  bool schedules_seen = false, paths_seen = false;
  while (in >> key) {
    if (key == "SCHEDULES") {
      std::string v;
      in >> v;
      m.schedules = BigInt(v);
      schedules_seen = true;
    } else if (key == "PATHS") {
      in >> m.paths;
      paths_seen = true;
    } else {
      throw ValidationError("manifest " + manifest_path_for(instance_path).string() +
                            ": unknown key '" + key + "'");
    }
  }
  if (!schedules_seen || !paths_seen)
    throw ValidationError("manifest " + manifest_path_for(instance_path).string() +
                          " needs SCHEDULES and PATHS");
  return m;
}

void save_manifest(const ProjectNetwork& network, const std::filesystem::path& instance_path) {
  std::ofstream out(manifest_path_for(instance_path), std::ios::binary);
  if (!out)
    throw Error("cannot write manifest " + manifest_path_for(instance_path).string());
  out << "SCHEDULES " << count_schedules(network).str() << "\n";
  out << "PATHS " << count_paths(network) << "\n";
}

ProjectNetwork generate_instance(const GeneratorParams& params) {
  if (params.n_activities < 1)
    throw ValidationError("generator needs at least one activity");
  if (params.min_modes < 1 || params.min_modes > params.max_modes)
    throw ValidationError("generator mode range must satisfy 1 <= min <= max");
  if (!(params.density > 0.0) || params.density > 1.0)
    throw ValidationError("generator density must be in (0, 1]");

  Rng rng(params.seed);
  const int n = params.n_activities;

  std::vector<Activity> acts(n);
  for (int i = 0; i < n; ++i) {
    Activity& act = acts[i];
    act.id = i + 1;
    const int n_modes =
        params.min_modes + static_cast<int>(rng.below(params.max_modes - params.min_modes + 1));

    // Distinct durations ascending; direct cost strictly decreasing as the
    // duration grows, which is the usual crashing shape.
    std::vector<int> durations(n_modes);
    int d = static_cast<int>(rng.range(3, 12));
    for (int j = 0; j < n_modes; ++j) {
      durations[j] = d;
      d += 1 + static_cast<int>(rng.below(5));
    }
    std::int64_t cost_cents = rng.range(5, 60) * 10000;  // cheapest (slowest) mode
    std::vector<Money> costs(n_modes);
    for (int j = n_modes - 1; j >= 0; --j) {
      costs[j] = Money::from_cents(cost_cents);
      if (j > 0) {
        const std::int64_t gap = durations[j] - durations[j - 1];
        cost_cents += gap * rng.range(50, 400) * 100;  // 50..400 per day saved
      }
    }
    for (int j = 0; j < n_modes; ++j)
      act.modes.push_back({durations[j], costs[j], false, Money(), Money()});
  }

  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k)
      if (rng.unit() < params.density) acts[i].successors.push_back(k + 1);

  const Money indirect = Money::from_cents(rng.range(20, 200) * 100);
  return ProjectNetwork(std::move(acts), indirect, std::nullopt, std::nullopt);
}

}  // namespace tct
