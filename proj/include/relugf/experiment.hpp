#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "relugf/config.hpp"
#include "relugf/csv.hpp"
#include "relugf/flow.hpp"
#include "relugf/theory.hpp"

namespace relugf {

struct CheckResult {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

struct SimulationResult {
  Trajectory trajectory;
  std::vector<CheckResult> checks;
  /// Ladder rung label, "NONE", or empty for non-affine targets.
  std::string rung;
  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

inline CheckResult run_check(const std::string& name, const Trajectory& traj, const Target& target,
                             const DomainMeasure& dom) {
  const double l0 = traj.risk.front();
  if (name == "conservation") {
    const double v = balancedness_drift(traj);
    return {name, v, 1e-8, v <= 1e-8};
  }
  if (name == "energy") {
    const double v = energy_residual(traj);
    return {name, v, 1e-6 * (1.0 + l0), v <= 1e-6 * (1.0 + l0)};
  }
  if (name == "monotone") {
    const double v = max_risk_increase(traj);
    return {name, v, 1e-10 * (1.0 + l0), v <= 1e-10 * (1.0 + l0)};
  }
  if (name == "lyapunov") {
    const LyapunovCheck c = lyapunov_check(traj, target, dom, traj.xi);
    return {name, c.max_violation, 1e-6 * (1.0 + lyapunov(traj.initial(), traj.xi)), c.ok};
  }
  if (name == "boundedness") {
    const BoundednessCheck c = boundedness_check(traj, target, dom, traj.xi);
    return {name, c.max_norm_while_above, c.bound, c.ok};
  }
  if (name == "limsup") {
    const LimsupCheck c = limsup_bound_check(traj, target, dom);
    return {name, c.terminal_risk, c.const_bound + 1e-8, c.ok};
  }
  throw ConfigError("checks: unknown check '" + name + "'");
}

inline std::string ladder_label(const Trajectory& traj, const Target& target, const DomainMeasure& dom) {
  if (!target.is_affine()) return {};
  const RiskLadder ladder = critical_ladder(traj.shape.H, target.alpha(), dom);
  try {
    const auto rung = classify_terminal_risk(traj.risk.back(), ladder);
    return rung ? rung->label() : std::string("NONE");
  } catch (const AmbiguousClassification&) {
    return "AMBIGUOUS";
  }
}

/// Integrates the configured flow and evaluates the requested checks.
/// Throws SolverError on numeric failure.
inline SimulationResult run_simulation(const ExperimentConfig& cfg) {
  const Target target = cfg.target();
  SimulationResult out;
  out.trajectory = integrate(cfg.initial_params(), target, cfg.domain, cfg.flow);
  for (const auto& name : cfg.checks) out.checks.push_back(run_check(name, out.trajectory, target, cfg.domain));
  out.rung = ladder_label(out.trajectory, target, cfg.domain);
  return out;
}

inline std::string format_summary(const ExperimentConfig& cfg, const SimulationResult& res) {
  const Trajectory& tr = res.trajectory;
  std::ostringstream os;
  os << "shape: d=" << cfg.shape.d << " H=" << cfg.shape.H << '\n';
  os << "domain: [" << format_double(cfg.domain.a) << ", " << format_double(cfg.domain.b)
     << "] rho=" << format_double(cfg.domain.rho) << '\n';
  if (cfg.init_theta) {
    os << "init: explicit\n";
  } else {
    os << "init: random distribution=" << cfg.init_random.distribution
       << " scale=" << format_double(cfg.init_scale()) << " seed=" << cfg.init_random.seed << '\n';
  }
  os << "t_end: " << format_double(tr.times.back()) << '\n';
  os << "accepted_steps: " << tr.size() - 1 << '\n';
  os << "rejected_steps: " << tr.rejected << '\n';
  os << "pattern_events: " << tr.events << '\n';
  os << "initial_risk: " << format_double(tr.risk.front()) << '\n';
  os << "terminal_risk: " << format_double(tr.risk.back()) << '\n';
  os << "terminal_grad_norm: " << format_double(tr.grad_norm.back()) << '\n';
  os << "xi: " << format_double(tr.xi) << '\n';
  if (!res.rung.empty()) os << "ladder_rung: " << res.rung << '\n';
  for (const auto& c : res.checks) {
    os << "check " << c.name << ": " << (c.pass ? "PASS" : "FAIL") << " value=" << format_double(c.value)
       << " threshold=" << format_double(c.threshold) << '\n';
  }
  os << "verdict: " << (res.all_pass() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

inline void write_outputs(const ExperimentConfig& cfg, const SimulationResult& res, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_trajectory_csv((std::filesystem::path(dir) / "trajectory.csv").string(), res.trajectory,
                       cfg.flow.sample_stride);
  std::ofstream summary(std::filesystem::path(dir) / "summary.txt", std::ios::binary);
  summary << format_summary(cfg, res);
}

}  // namespace relugf
