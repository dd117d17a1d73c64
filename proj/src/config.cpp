#include "bihartree/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "bihartree/error.hpp"

namespace bihartree {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ParameterError("expected a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ParameterError("expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ParameterError("expected a nonnegative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ParameterError("expected a boolean, got '" + v + "'");
}

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string boolean(bool v) { return v ? "true" : "false"; }

struct Key {
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

const std::vector<Key>& keys() {
  using C = RunConfig;
  using S = const std::string&;
  using O = std::optional<std::string>;
  static const std::vector<Key> table = {
      {"N", [](C& c, S v) { c.params.N = static_cast<int>(to_long(v)); },
       [](const C& c) -> O { return std::to_string(c.params.N); }},
      {"alpha", [](C& c, S v) { c.params.alpha = to_double(v); }, [](const C& c) -> O { return num(c.params.alpha); }},
      {"b", [](C& c, S v) { c.params.b = to_double(v); }, [](const C& c) -> O { return num(c.params.b); }},
      {"p", [](C& c, S v) { c.params.p = to_double(v); }, [](const C& c) -> O { return num(c.params.p); }},
      {"d", [](C& c, S v) { c.d = static_cast<int>(to_long(v)); },
       [](const C& c) -> O { return c.given.count("d") ? O(std::to_string(c.d)) : std::nullopt; }},
      {"L", [](C& c, S v) { c.L = to_double(v); },
       [](const C& c) -> O { return c.given.count("L") ? O(num(c.L)) : std::nullopt; }},
      {"M", [](C& c, S v) { c.M = static_cast<int>(to_long(v)); },
       [](const C& c) -> O { return c.given.count("M") ? O(std::to_string(c.M)) : std::nullopt; }},
      {"dt", [](C& c, S v) { c.evolve.dt = to_double(v); }, [](const C& c) -> O { return num(c.evolve.dt); }},
      {"T", [](C& c, S v) { c.evolve.T = to_double(v); }, [](const C& c) -> O { return num(c.evolve.T); }},
      {"cadence", [](C& c, S v) { c.evolve.cadence = static_cast<int>(to_long(v)); },
       [](const C& c) -> O { return std::to_string(c.evolve.cadence); }},
      {"sigma", [](C& c, S v) { c.sigma = to_double(v); }, [](const C& c) -> O { return num(c.sigma); }},
      {"dealias", [](C& c, S v) { c.dealias = to_bool(v); }, [](const C& c) -> O { return boolean(c.dealias); }},
      {"R_diag", [](C& c, S v) { c.R_diag = to_double(v); },
       [](const C& c) -> O { return c.R_diag ? O(num(*c.R_diag)) : std::nullopt; }},
      {"nonlinear", [](C& c, S v) { c.evolve.nonlinear = to_bool(v); },
       [](const C& c) -> O { return boolean(c.evolve.nonlinear); }},
      {"defocusing", [](C& c, S v) { c.defocusing = to_bool(v); },
       [](const C& c) -> O { return boolean(c.defocusing); }},
      {"initial.kind", [](C& c, S v) { c.initial.kind = v; }, [](const C& c) -> O { return c.initial.kind; }},
      {"initial.amplitude", [](C& c, S v) { c.initial.amplitude = to_double(v); },
       [](const C& c) -> O { return num(c.initial.amplitude); }},
      {"initial.width", [](C& c, S v) { c.initial.width = to_double(v); },
       [](const C& c) -> O { return num(c.initial.width); }},
      {"initial.velocity",
       [](C& c, S v) {
         std::array<double, 3> vel{0.0, 0.0, 0.0};
         std::stringstream ss(v);
         std::string item;
         std::size_t n = 0;
         while (std::getline(ss, item, ',')) {
           if (n == 3) throw ParameterError("velocity has more than 3 components");
           vel[n++] = to_double(trim(item));
         }
         c.initial.velocity = vel;
       },
       [](const C& c) -> O {
         const auto& v = c.initial.velocity;
         return num(v[0]) + "," + num(v[1]) + "," + num(v[2]);
       }},
      {"initial.lambda", [](C& c, S v) { c.initial.lambda = to_double(v); },
       [](const C& c) -> O { return num(c.initial.lambda); }},
      {"initial.perturbation", [](C& c, S v) { c.initial.perturbation = to_double(v); },
       [](const C& c) -> O { return num(c.initial.perturbation); }},
      {"initial.path", [](C& c, S v) { c.initial.path = v; },
       [](const C& c) -> O { return c.initial.path.empty() ? std::nullopt : O(c.initial.path); }},
      {"gs.compute", [](C& c, S v) { c.gs.compute = to_bool(v); }, [](const C& c) -> O { return boolean(c.gs.compute); }},
      {"gs.tol", [](C& c, S v) { c.gs.tol = to_double(v); }, [](const C& c) -> O { return num(c.gs.tol); }},
      {"gs.max_iter", [](C& c, S v) { c.gs.max_iter = static_cast<int>(to_long(v)); },
       [](const C& c) -> O { return std::to_string(c.gs.max_iter); }},
      {"gs.seed_amplitude", [](C& c, S v) { c.gs.seed_amplitude = to_double(v); },
       [](const C& c) -> O { return num(c.gs.seed_amplitude); }},
      {"gs.seed_width", [](C& c, S v) { c.gs.seed_width = to_double(v); },
       [](const C& c) -> O { return num(c.gs.seed_width); }},
      {"output.dir", [](C& c, S v) { c.output.dir = v; }, [](const C& c) -> O { return c.output.dir; }},
      {"output.checkpoint_every", [](C& c, S v) { c.output.checkpoint_every = to_long(v); },
       [](const C& c) -> O { return std::to_string(c.output.checkpoint_every); }},
      {"scatter.threshold", [](C& c, S v) { c.scatter_threshold = to_double(v); },
       [](const C& c) -> O { return c.scatter_threshold ? O(num(*c.scatter_threshold)) : std::nullopt; }},
      {"seed", [](C& c, S v) { c.seed = to_u64(v); }, [](const C& c) -> O { return std::to_string(c.seed); }},
  };
  return table;
}

const Key& find_key(const std::string& name) {
  for (const auto& k : keys())
    if (name == k.name) return k;
  throw ParameterError("unknown key '" + name + "'");
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& k = find_key(key);
  k.set(cfg, value);
  cfg.given.insert(key);
}

std::pair<std::string, std::string> split_assignment(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ParameterError("expected key = value");
  auto key = trim(std::string_view(line).substr(0, eq));
  auto value = trim(std::string_view(line).substr(eq + 1));
  if (key.empty()) throw ParameterError("empty key");
  if (value.empty()) throw ParameterError("empty value for '" + key + "'");
  return {key, value};
}

void require(const RunConfig& cfg, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (!cfg.given.count(n)) throw ParameterError(std::string("missing required key '") + n + "'");
}

}  // namespace

CacheOptions RunConfig::cache_options() const {
  CacheOptions o;
  o.sigma = sigma;
  o.dealias = dealias;
  o.coupling = defocusing ? -1.0 : 1.0;
  o.R_diag = diag_radius();
  return o;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const auto line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    try {
      const auto [key, value] = split_assignment(line);
      if (!seen.insert(key).second) throw ParameterError("repeated key '" + key + "'");
      assign(cfg, key, value);
    } catch (const ParameterError& e) {
      throw ParameterError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    try {
      const auto [key, value] = split_assignment(a);
      assign(cfg, key, value);
    } catch (const ParameterError& e) {
      throw ParameterError("--set " + a + ": " + e.what());
    }
  }
}

void validate_config(const RunConfig& cfg, ConfigScope scope) {
  require(cfg, {"N", "alpha", "b", "p"});
  validate(cfg.params);
  if (scope == ConfigScope::params) return;

  require(cfg, {"d", "L", "M"});
  if (cfg.params.p < 2.0) throw ParameterError("p must be >= 2 for time stepping and ground states");
  if (cfg.d < 1 || cfg.d > 3) throw ParameterError("d must be 1, 2 or 3");
  if (cfg.M < 8 || cfg.M % 2 != 0) throw ParameterError("M must be even and >= 8");
  if (!(cfg.L > 0.0)) throw ParameterError("L must be positive");
  step_count(cfg.evolve);
  if (!(cfg.sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (!(cfg.diag_radius() > 0.0)) throw ParameterError("R_diag must be positive");
  const auto& k = cfg.initial.kind;
  if (k != "gaussian" && k != "groundstate" && k != "file")
    throw ParameterError("initial.kind must be gaussian, groundstate or file");
  if (k == "gaussian" && !(cfg.initial.width > 0.0)) throw ParameterError("initial.width must be positive");
  if (k == "file" && cfg.initial.path.empty()) throw ParameterError("initial.path is required for initial.kind = file");
  if (!(cfg.gs.tol > 0.0)) throw ParameterError("gs.tol must be positive");
  if (cfg.gs.max_iter < 1) throw ParameterError("gs.max_iter must be >= 1");
  if (!(cfg.gs.seed_width > 0.0)) throw ParameterError("gs.seed_width must be positive");
  if (cfg.output.checkpoint_every < 0 || cfg.output.checkpoint_every % cfg.evolve.cadence != 0)
    throw ParameterError("output.checkpoint_every must be a nonnegative multiple of cadence");
  if (cfg.scatter_threshold && !(*cfg.scatter_threshold > 0.0))
    throw ParameterError("scatter.threshold must be positive");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  auto cfg = parse_config(buf.str(), path);
  validate_config(cfg, ConfigScope::run);
  return cfg;
}

std::string dump_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : keys())
    if (const auto v = k.get(cfg)) out += std::string(k.name) + " = " + *v + "\n";
  return out;
}

}  // namespace bihartree
