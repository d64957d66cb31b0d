#include "polydg/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "polydg/problems.hpp"

namespace polydg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("bad value for " + key + ": '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("bad value for " + key + ": '" + value + "' (expected true or false)");
}

std::vector<int> parse_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<int>(key, item));
  }
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

struct Field {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define POLYDG_STRING(f) \
  Field{#f, [](RunConfig& c, const std::string& v) { c.f = v; }, [](const RunConfig& c) { return c.f; }}
#define POLYDG_NUMBER(f, T)                                                           \
  Field{#f, [](RunConfig& c, const std::string& v) { c.f = parse_number<T>(#f, v); }, \
        [](const RunConfig& c) { return fmt(static_cast<double>(c.f)); }}
#define POLYDG_LIST(f)                                                           \
  Field{#f, [](RunConfig& c, const std::string& v) { c.f = parse_list(#f, v); }, \
        [](const RunConfig& c) { return join(c.f); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      POLYDG_STRING(problem),
      POLYDG_STRING(mesh),
      POLYDG_STRING(agglomeration),
      POLYDG_STRING(mesh_gen),
      POLYDG_NUMBER(mesh_n, int),
      POLYDG_STRING(agglomerate),
      POLYDG_NUMBER(jitter, double),
      POLYDG_NUMBER(degree, int),
      POLYDG_STRING(family),
      POLYDG_NUMBER(approach, int),
      POLYDG_STRING(accumulation),
      POLYDG_NUMBER(workers, int),
      POLYDG_NUMBER(parts, int),
      POLYDG_NUMBER(quadrature_increment, int),
      POLYDG_NUMBER(c_sigma, double),
      Field{"coverable", [](RunConfig& c, const std::string& v) { c.coverable = parse_bool("coverable", v); },
            [](const RunConfig& c) { return std::string(c.coverable ? "true" : "false"); }},
      POLYDG_NUMBER(t_end, double),
      POLYDG_NUMBER(time_steps, int),
      POLYDG_LIST(levels),
      POLYDG_LIST(bench_workers),
      POLYDG_NUMBER(repeat, int),
      POLYDG_NUMBER(tol, double),
      POLYDG_NUMBER(max_iter, int),
      POLYDG_NUMBER(restart, int),
      Field{"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>("seed", v); },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      POLYDG_STRING(output),
  };
  return table;
}

#undef POLYDG_STRING
#undef POLYDG_NUMBER
#undef POLYDG_LIST

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.name);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const Field& f : fields())
    if (f.name == key) {
      f.set(cfg, value);
      return;
    }
  throw ConfigError("unknown key '" + key + "'");
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set_config_value(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_override(cfg, line);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_config(in, path);
}

void validate(const RunConfig& cfg) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  const auto names = named_problem_names();
  require(std::find(names.begin(), names.end(), cfg.problem) != names.end(), "unknown problem '" + cfg.problem + "'");
  require(cfg.mesh_gen == "square" || cfg.mesh_gen == "cube", "mesh_gen must be square or cube");
  require(cfg.mesh_n >= 1, "mesh_n must be positive");
  require(cfg.agglomeration.empty() || !cfg.mesh.empty(), "agglomeration needs mesh");
  require(cfg.agglomerate == "none" || cfg.agglomerate.rfind("block:", 0) == 0 || cfg.agglomerate.rfind("seeded:", 0) == 0,
          "agglomerate must be none, block:R or seeded:K");
  require(cfg.jitter >= 0.0 && cfg.jitter < 0.3, "jitter must lie in [0, 0.3)");
  require(cfg.degree >= 0 && cfg.degree <= 10, "degree must lie in [0, 10]");
  require(cfg.family == "P" || cfg.family == "PQ", "family must be P or PQ");
  require(cfg.approach == 1 || cfg.approach == 2, "approach must be 1 or 2");
  require(cfg.accumulation == "deterministic" || cfg.accumulation == "atomic",
          "accumulation must be deterministic or atomic");
  require(cfg.workers >= 1, "workers must be at least 1");
  require(cfg.parts >= 1, "parts must be at least 1");
  require(cfg.quadrature_increment >= 0, "quadrature_increment must be nonnegative");
  require(cfg.c_sigma > 0.0, "c_sigma must be positive");
  require(cfg.t_end > 0.0, "t_end must be positive");
  require(cfg.time_steps >= 1, "time_steps must be at least 1");
  for (int n : cfg.levels) require(n >= 1, "levels must be positive");
  for (int w : cfg.bench_workers) require(w >= 1, "bench_workers must be positive");
  require(cfg.repeat >= 1, "repeat must be at least 1");
  require(cfg.tol > 0.0, "tol must be positive");
  require(cfg.max_iter >= 1 && cfg.restart >= 1, "max_iter and restart must be positive");
  require(!cfg.output.empty(), "output must not be empty");
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  for (const Field& f : fields()) out << f.name << '=' << f.get(cfg) << '\n';
}

}  // namespace polydg
