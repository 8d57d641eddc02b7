#pragma once

// Experiment configuration, read from JSON. Every object rejects keys it does
// not know; ConfigError names the offending field by its dotted path.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "relugf/flow.hpp"
#include "relugf/highdim.hpp"
#include "relugf/model.hpp"

namespace relugf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"conservation", "energy",      "monotone",
                                              "lyapunov",     "boundedness", "limsup"};
  return names;
}

struct RandomInit {
  std::string distribution = "normal";
  /// Defaults to 1/sqrt(H).
  std::optional<double> scale;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  NetworkShape shape{1, 1};
  DomainMeasure domain{0.0, 1.0, 1.0};
  std::vector<Target::Piece> target_pieces;  // empty => affine
  double alpha = 1.0;
  double beta = 0.0;
  std::optional<std::vector<double>> init_theta;
  RandomInit init_random;
  FlowConfig flow;
  std::vector<std::string> checks = known_checks();
  std::string output_dir = "out";

  Target target() const {
    return target_pieces.empty() ? Target::affine(alpha, beta, domain) : Target::piecewise(target_pieces);
  }

  double init_scale() const {
    return init_random.scale.value_or(1.0 / std::sqrt(static_cast<double>(shape.H)));
  }

  ParamVector initial_params() const {
    if (init_theta) return ParamVector(shape, *init_theta);
    ParamVector theta(shape);
    const CounterRng rng(init_random.seed, 0x696e6974u);
    const double s = init_scale();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      theta[k] = init_random.distribution == "normal" ? s * rng.normal(k) : s * (2.0 * rng.uniform(k) - 1.0);
    }
    return theta;
  }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ConfigError("unknown key '" + (path.empty() ? "" : path + ".") + item.key() + "'");
  }
}

inline double get_number(const json& obj, const char* key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
  return v.get<double>();
}

inline std::uint64_t get_count(const json& obj, const char* key, const std::string& path, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(path + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& root) {
  using detail::get_count;
  using detail::get_number;
  detail::reject_unknown(root, "", {"shape", "domain", "target", "init", "flow", "checks", "output"});
  ExperimentConfig cfg;

  if (root.contains("shape")) {
    const auto& s = root.at("shape");
    detail::reject_unknown(s, "shape", {"d", "H"});
    const auto d = get_count(s, "d", "shape", 1);
    const auto H = get_count(s, "H", "shape", 1);
    if (d == 0) throw ConfigError("shape.d: must be positive");
    if (H == 0) throw ConfigError("shape.H: must be positive");
    cfg.shape = NetworkShape(d, H);
  }

  if (root.contains("domain")) {
    const auto& s = root.at("domain");
    detail::reject_unknown(s, "domain", {"a", "b", "rho"});
    const double a = get_number(s, "a", "domain", 0.0);
    const double b = get_number(s, "b", "domain", 1.0);
    const double rho = get_number(s, "rho", "domain", 1.0);
    if (!(b > a)) throw ConfigError("domain.b: must exceed domain.a");
    if (!(rho > 0.0)) throw ConfigError("domain.rho: must be positive");
    cfg.domain = DomainMeasure(a, b, rho);
  }

  if (root.contains("target")) {
    const auto& s = root.at("target");
    detail::reject_unknown(s, "target", {"alpha", "beta", "pieces"});
    if (s.contains("pieces")) {
      if (s.contains("alpha") || s.contains("beta")) {
        throw ConfigError("target: give either alpha/beta or pieces, not both");
      }
      const auto& arr = s.at("pieces");
      if (!arr.is_array() || arr.empty()) throw ConfigError("target.pieces: expected a non-empty array");
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string path = "target.pieces[" + std::to_string(k) + "]";
        detail::reject_unknown(arr[k], path, {"lo", "hi", "slope", "intercept"});
        for (const char* key : {"lo", "hi", "slope", "intercept"}) {
          if (!arr[k].contains(key)) throw ConfigError(path + "." + key + ": missing");
        }
        cfg.target_pieces.push_back({get_number(arr[k], "lo", path, 0), get_number(arr[k], "hi", path, 0),
                                     get_number(arr[k], "slope", path, 0),
                                     get_number(arr[k], "intercept", path, 0)});
      }
    } else {
      cfg.alpha = get_number(s, "alpha", "target", 1.0);
      cfg.beta = get_number(s, "beta", "target", 0.0);
    }
  }

  if (root.contains("init")) {
    const auto& s = root.at("init");
    detail::reject_unknown(s, "init", {"theta", "random"});
    if (s.contains("theta") == s.contains("random")) {
      throw ConfigError("init: give exactly one of theta or random");
    }
    if (s.contains("theta")) {
      const auto& arr = s.at("theta");
      if (!arr.is_array()) throw ConfigError("init.theta: expected an array of numbers");
      std::vector<double> values;
      for (const auto& e : arr) {
        if (!e.is_number()) throw ConfigError("init.theta: expected an array of numbers");
        values.push_back(e.get<double>());
      }
      if (values.size() != cfg.shape.dim()) {
        throw ConfigError("init.theta: expected " + std::to_string(cfg.shape.dim()) + " values, got " +
                          std::to_string(values.size()));
      }
      cfg.init_theta = std::move(values);
    } else {
      const auto& r = s.at("random");
      detail::reject_unknown(r, "init.random", {"distribution", "scale", "seed"});
      if (r.contains("distribution")) {
        if (!r.at("distribution").is_string()) throw ConfigError("init.random.distribution: expected a string");
        cfg.init_random.distribution = r.at("distribution").get<std::string>();
        if (cfg.init_random.distribution != "normal" && cfg.init_random.distribution != "uniform") {
          throw ConfigError("init.random.distribution: expected 'normal' or 'uniform'");
        }
      }
      if (r.contains("scale")) {
        const double sc = get_number(r, "scale", "init.random", 1.0);
        if (!(sc > 0.0)) throw ConfigError("init.random.scale: must be positive");
        cfg.init_random.scale = sc;
      }
      cfg.init_random.seed = get_count(r, "seed", "init.random", 0);
    }
  } else {
    throw ConfigError("init: missing");
  }

  if (root.contains("flow")) {
    const auto& s = root.at("flow");
    detail::reject_unknown(s, "flow",
                           {"t_end", "dt_init", "dt_min", "dt_max", "rk_tol", "event_tol", "max_steps", "xi"});
    FlowConfig& f = cfg.flow;
    f.t_end = get_number(s, "t_end", "flow", f.t_end);
    f.dt_init = get_number(s, "dt_init", "flow", f.dt_init);
    f.dt_min = get_number(s, "dt_min", "flow", f.dt_min);
    f.dt_max = get_number(s, "dt_max", "flow", f.dt_max);
    f.rk_tol = get_number(s, "rk_tol", "flow", f.rk_tol);
    f.event_tol = get_number(s, "event_tol", "flow", f.event_tol);
    f.max_steps = get_count(s, "max_steps", "flow", f.max_steps);
    if (s.contains("xi")) f.xi = get_number(s, "xi", "flow", 0.0);
  }

  if (root.contains("checks")) {
    const auto& arr = root.at("checks");
    if (!arr.is_array()) throw ConfigError("checks: expected an array of names");
    cfg.checks.clear();
    for (const auto& e : arr) {
      if (!e.is_string()) throw ConfigError("checks: expected an array of names");
      const std::string name = e.get<std::string>();
      bool ok = false;
      for (const auto& k : known_checks()) ok = ok || k == name;
      if (!ok) throw ConfigError("checks: unknown check '" + name + "'");
      cfg.checks.push_back(name);
    }
  }

  if (root.contains("output")) {
    const auto& s = root.at("output");
    detail::reject_unknown(s, "output", {"directory", "stride"});
    if (s.contains("directory")) {
      if (!s.at("directory").is_string()) throw ConfigError("output.directory: expected a string");
      cfg.output_dir = s.at("directory").get<std::string>();
    }
    cfg.flow.sample_stride = get_count(s, "stride", "output", 1);
  }

  if (const std::string bad = cfg.flow.invalid_field(); !bad.empty()) {
    throw ConfigError((bad == "sample_stride" ? "output.stride" : "flow." + bad) + ": invalid value");
  }
  if (cfg.shape.d != 1) throw ConfigError("shape.d: simulation supports d = 1 only");
  try {
    (void)cfg.target().pieces();
    cfg.target().require_matches(cfg.domain);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("target: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  return parse_config(root);
}

}  // namespace relugf
