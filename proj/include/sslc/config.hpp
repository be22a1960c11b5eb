#pragma once

// JSON configuration for oracle definitions and experiments.
//
// Oracle keys: name, dim, lower[], upper[], background{weight, eta},
//   components[]{center[], radius, weight, eta}, lambda_star, r0, r0_c0, s0,
//   gamma, gamma_c0, L (optional), lma{C0, alpha} (optional).
//
// Experiment keys (flat): oracle (shipped name or inline object), resolution,
//   lambda, lambdas[], kernel, bandwidth, beta, clip_alpha, merge_tau, n[],
//   m[], reps, theta, thm2_constant, seed, out, population.

#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sslc/density.hpp"
#include "sslc/distribution.hpp"
#include "sslc/error.hpp"
#include "sslc/shipped_oracles.hpp"

namespace sslc {

using nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError(where + "." + it.key() + ": unknown key");
}

template <class T>
T get_field(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + "." + key + ": missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <class T>
T get_field_or(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return get_field<T>(j, key, where);
}

inline Point to_point(const std::vector<double>& v, int dim, const std::string& where) {
  if (static_cast<int>(v.size()) != dim) throw ConfigError(where + ": expected " +
                                                           std::to_string(dim) + " coordinates");
  Point p{};
  for (int k = 0; k < dim; ++k) p[k] = v[k];
  return p;
}

}  // namespace detail

inline SyntheticDistribution distribution_from_json(const json& j,
                                                    const std::string& where = "oracle") {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  detail::reject_unknown_keys(j,
                              {"name", "dim", "lower", "upper", "background", "components",
                               "lambda_star", "r0", "r0_c0", "s0", "gamma", "gamma_c0", "L",
                               "lma"},
                              where);
  SyntheticDistribution d;
  d.name = detail::get_field_or<std::string>(j, "name", "custom", where);
  d.dim = detail::get_field<int>(j, "dim", where);
  if (d.dim < 1 || d.dim > kMaxDim) throw ConfigError(where + ".dim: must be 1, 2 or 3");
  d.lower = detail::get_field_or<std::vector<double>>(j, "lower", std::vector<double>(d.dim, 0.0), where);
  d.upper = detail::get_field_or<std::vector<double>>(j, "upper", std::vector<double>(d.dim, 1.0), where);
  if (j.contains("background")) {
    const json& b = j.at("background");
    detail::reject_unknown_keys(b, {"weight", "eta"}, where + ".background");
    d.background_weight = detail::get_field<double>(b, "weight", where + ".background");
    d.background_eta = detail::get_field_or<double>(b, "eta", 0.5, where + ".background");
  }
  const json comps = j.value("components", json::array());
  if (!comps.is_array()) throw ConfigError(where + ".components: expected an array");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string w = where + ".components[" + std::to_string(i) + "]";
    detail::reject_unknown_keys(comps[i], {"center", "radius", "weight", "eta"}, w);
    Bump b;
    b.center = detail::to_point(detail::get_field<std::vector<double>>(comps[i], "center", w),
                                d.dim, w + ".center");
    b.radius = detail::get_field<double>(comps[i], "radius", w);
    b.weight = detail::get_field<double>(comps[i], "weight", w);
    b.eta = detail::get_field<double>(comps[i], "eta", w);
    d.bumps.push_back(b);
  }
  d.lambda_star = detail::get_field<double>(j, "lambda_star", where);
  d.r0 = detail::get_field_or<double>(j, "r0", 0.0, where);
  d.r0_c0 = detail::get_field_or<double>(j, "r0_c0", 1.0, where);
  d.s0 = detail::get_field_or<double>(j, "s0", 0.0, where);
  d.gamma = detail::get_field_or<double>(j, "gamma", 1.0, where);
  d.gamma_c0 = detail::get_field_or<double>(j, "gamma_c0", 1.0, where);
  if (j.contains("L") && !j.at("L").is_null()) d.sup_bound = detail::get_field<double>(j, "L", where);
  if (j.contains("lma") && !j.at("lma").is_null()) {
    const json& l = j.at("lma");
    detail::reject_unknown_keys(l, {"C0", "alpha"}, where + ".lma");
    d.lma = LmaConstants{detail::get_field<double>(l, "C0", where + ".lma"),
                         detail::get_field<double>(l, "alpha", where + ".lma")};
  }
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return d;
}

inline json to_json(const SyntheticDistribution& d) {
  json j;
  j["name"] = d.name;
  j["dim"] = d.dim;
  j["lower"] = d.lower;
  j["upper"] = d.upper;
  j["background"] = {{"weight", d.background_weight}, {"eta", d.background_eta}};
  json comps = json::array();
  for (const Bump& b : d.bumps)
    comps.push_back({{"center", std::vector<double>(b.center.begin(), b.center.begin() + d.dim)},
                     {"radius", b.radius},
                     {"weight", b.weight},
                     {"eta", b.eta}});
  j["components"] = comps;
  j["lambda_star"] = d.lambda_star;
  j["r0"] = d.r0;
  j["r0_c0"] = d.r0_c0;
  j["s0"] = d.s0;
  j["gamma"] = d.gamma;
  j["gamma_c0"] = d.gamma_c0;
  if (d.sup_bound) j["L"] = *d.sup_bound;
  if (d.lma) j["lma"] = {{"C0", d.lma->c0}, {"alpha", d.lma->alpha}};
  return j;
}

inline std::vector<std::string> shipped_oracle_names() {
  std::vector<std::string> out;
  for (const auto& o : shipped_oracle_sources()) out.emplace_back(o.name);
  return out;
}

inline SyntheticDistribution shipped_oracle(const std::string& name) {
  for (const auto& o : shipped_oracle_sources())
    if (o.name == name) return distribution_from_json(json::parse(o.json), "oracle " + name);
  throw ConfigError("oracle: unknown shipped oracle '" + name + "'");
}

struct ExperimentConfig {
  std::string oracle_ref;  // shipped name, empty when inline
  SyntheticDistribution oracle;
  int resolution = 128;
  double level = 1.0;
  std::vector<double> levels;  // optional lambda sweep; empty means {level}
  KdeConfig kde;
  std::optional<double> clip_alpha;  // default gamma * a / 2
  std::optional<double> merge_tau;   // default 2 / log m
  std::vector<std::size_t> n_values{50};
  std::vector<std::size_t> m_values{5000};
  std::size_t reps = 1;
  double theta = 0.5;
  double thm2_constant = 1.0;
  std::uint64_t seed = 0;
  std::string out = "out";
  bool population = false;

  std::vector<double> sweep_levels() const { return levels.empty() ? std::vector<double>{level} : levels; }
};

inline ExperimentConfig experiment_from_json(const json& j) {
  const std::string w = "config";
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  detail::reject_unknown_keys(j,
                              {"oracle", "resolution", "lambda", "lambdas", "kernel", "bandwidth",
                               "beta", "clip_alpha", "merge_tau", "n", "m", "reps", "theta",
                               "thm2_constant", "seed", "out", "population"},
                              w);
  ExperimentConfig c;
  if (!j.contains("oracle")) throw ConfigError("config.oracle: missing");
  if (j.at("oracle").is_string()) {
    c.oracle_ref = j.at("oracle").get<std::string>();
    c.oracle = shipped_oracle(c.oracle_ref);
  } else {
    c.oracle = distribution_from_json(j.at("oracle"), "config.oracle");
  }
  c.resolution = detail::get_field_or<int>(j, "resolution", 128, w);
  if (c.resolution < 2) throw ConfigError("config.resolution: must be >= 2");
  c.level = detail::get_field_or<double>(j, "lambda", c.oracle.lambda_star, w);
  if (!(c.level > 0.0)) throw ConfigError("config.lambda: must be positive");
  c.levels = detail::get_field_or<std::vector<double>>(j, "lambdas", {}, w);
  for (double l : c.levels)
    if (!(l > 0.0)) throw ConfigError("config.lambdas: values must be positive");
  try {
    c.kde.kernel = parse_kernel(detail::get_field_or<std::string>(j, "kernel", "epanechnikov", w));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config.kernel: ") + e.what());
  }
  if (j.contains("bandwidth") && !j.at("bandwidth").is_null()) {
    c.kde.bandwidth = detail::get_field<double>(j, "bandwidth", w);
    if (!(*c.kde.bandwidth > 0.0)) throw ConfigError("config.bandwidth: must be positive");
  }
  c.kde.beta = detail::get_field_or<double>(j, "beta", 1.0, w);
  if (!(c.kde.beta > 0.0)) throw ConfigError("config.beta: must be positive");
  if (j.contains("clip_alpha") && !j.at("clip_alpha").is_null()) {
    c.clip_alpha = detail::get_field<double>(j, "clip_alpha", w);
    if (!(*c.clip_alpha > 0.0)) throw ConfigError("config.clip_alpha: must be positive");
  }
  if (j.contains("merge_tau") && !j.at("merge_tau").is_null()) {
    c.merge_tau = detail::get_field<double>(j, "merge_tau", w);
    if (!(*c.merge_tau > 0.0)) throw ConfigError("config.merge_tau: must be positive");
  }
  c.n_values = detail::get_field_or<std::vector<std::size_t>>(j, "n", {50}, w);
  c.m_values = detail::get_field_or<std::vector<std::size_t>>(j, "m", {5000}, w);
  if (c.n_values.empty()) throw ConfigError("config.n: list must be nonempty");
  if (c.m_values.empty()) throw ConfigError("config.m: list must be nonempty");
  for (auto n : c.n_values)
    if (n < 1) throw ConfigError("config.n: values must be >= 1");
  c.reps = detail::get_field_or<std::size_t>(j, "reps", 1, w);
  if (c.reps < 1) throw ConfigError("config.reps: must be >= 1");
  c.theta = detail::get_field_or<double>(j, "theta", 0.5, w);
  if (!(c.theta > 0.0 && c.theta < 1.0)) throw ConfigError("config.theta: must lie in (0, 1)");
  c.thm2_constant = detail::get_field_or<double>(j, "thm2_constant", 1.0, w);
  if (!j.contains("seed")) throw ConfigError("config.seed: missing (runs must be seeded)");
  c.seed = detail::get_field<std::uint64_t>(j, "seed", w);
  c.out = detail::get_field_or<std::string>(j, "out", "out", w);
  c.population = detail::get_field_or<bool>(j, "population", false, w);
  return c;
}

inline json to_json(const ExperimentConfig& c) {
  json j;
  if (c.oracle_ref.empty()) j["oracle"] = to_json(c.oracle);
  else j["oracle"] = c.oracle_ref;
  j["resolution"] = c.resolution;
  j["lambda"] = c.level;
  j["lambdas"] = c.levels;
  j["kernel"] = kernel_name(c.kde.kernel);
  j["bandwidth"] = c.kde.bandwidth ? json(*c.kde.bandwidth) : json(nullptr);
  j["beta"] = c.kde.beta;
  j["clip_alpha"] = c.clip_alpha ? json(*c.clip_alpha) : json(nullptr);
  j["merge_tau"] = c.merge_tau ? json(*c.merge_tau) : json(nullptr);
  j["n"] = c.n_values;
  j["m"] = c.m_values;
  j["reps"] = c.reps;
  j["theta"] = c.theta;
  j["thm2_constant"] = c.thm2_constant;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["population"] = c.population;
  return j;
}

inline ExperimentConfig parse_experiment(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return experiment_from_json(j);
}

// FNV-1a over the canonical dump; object keys are sorted, so the hash does
// not depend on key order in the source file.
inline std::uint64_t config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

}  // namespace sslc
