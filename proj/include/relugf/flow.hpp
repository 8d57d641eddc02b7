#pragma once

// Gradient flow theta' = -G(theta) for d = 1.
//
// G is continuous away from degenerate neurons but only piecewise smooth: its
// derivative jumps whenever the segment structure of the realization changes
// (a kink enters or leaves [a, b], kinks swap order, or a kink crosses a target
// break). Steps are therefore never allowed to straddle such a change: a step
// that alters the pattern signature is shrunk by bisection until it overshoots
// the change surface by at most `event_tol` in time.
//
// The running integrals int_0^t |G|^2 ds and int_0^t L ds are carried along as
// extra quadrature components of the same Runge-Kutta step (their integrands
// depend on theta only), so the energy and Lyapunov monitors inherit the
// solver's order instead of the O(h^2) floor of a trapezoid on the output grid.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "relugf/exact_risk.hpp"
#include "relugf/model.hpp"

namespace relugf {

struct FlowConfig {
  double t_end = 100.0;
  double dt_init = 1e-3;
  double dt_min = 1e-14;
  double dt_max = 1.0;
  /// Mixed tolerance on the local error: |err_k| <= rk_tol (1 + |theta_k|).
  double rk_tol = 1e-12;
  double event_tol = 1e-12;
  std::size_t sample_stride = 1;
  std::size_t max_steps = 20'000'000;
  /// Constant used for the V monitor; defaults to the target mean.
  std::optional<double> xi;

  /// Empty string when valid, otherwise the name of the offending field.
  std::string invalid_field() const {
    if (!(t_end > 0.0)) return "t_end";
    if (!(dt_min > 0.0)) return "dt_min";
    if (!(dt_init >= dt_min)) return "dt_init";
    if (!(dt_max >= dt_init)) return "dt_max";
    if (!(rk_tol > 0.0)) return "rk_tol";
    if (!(event_tol > 0.0)) return "event_tol";
    if (sample_stride == 0) return "sample_stride";
    if (max_steps == 0) return "max_steps";
    return {};
  }

  void validate() const {
    if (const std::string f = invalid_field(); !f.empty()) {
      throw std::invalid_argument("FlowConfig: invalid value for '" + f + "'");
    }
  }
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double t, ParamVector state)
      : std::runtime_error(what), t_(t), state_(std::move(state)) {}
  double time() const { return t_; }
  const ParamVector& state() const { return state_; }

 private:
  double t_;
  ParamVector state_;
};

struct Trajectory {
  NetworkShape shape;
  double xi = 0.0;
  std::vector<double> times;
  std::vector<ParamVector> params;
  std::vector<double> risk;
  std::vector<double> grad_norm;
  /// W[k][i]: balancedness of neuron i at times[k].
  std::vector<std::vector<double>> W;
  std::vector<double> V;
  /// int_0^t |G|^2 ds and int_0^t L ds, integrated with the step's RK weights.
  std::vector<double> dissipation;
  std::vector<double> risk_integral;
  std::size_t events = 0;
  std::size_t rejected = 0;

  std::size_t size() const { return times.size(); }
  const ParamVector& initial() const { return params.front(); }
  const ParamVector& final() const { return params.back(); }

  void record(double t, const ParamVector& theta, const RiskReport& rep, double dissipated = 0.0,
              double integrated_risk = 0.0) {
    times.push_back(t);
    dissipation.push_back(dissipated);
    risk_integral.push_back(integrated_risk);
    params.push_back(theta);
    risk.push_back(rep.risk);
    grad_norm.push_back(rep.grad_norm);
    std::vector<double> w(shape.H);
    for (std::size_t i = 0; i < shape.H; ++i) w[i] = balancedness(theta, i);
    W.push_back(std::move(w));
    V.push_back(lyapunov(theta, xi));
  }
};

inline std::vector<double> vector_field(const ParamVector& theta, const Target& target,
                                        const DomainMeasure& dom) {
  require_1d(theta.shape(), "vector_field");
  std::vector<double> g = gradient(theta, target, dom);
  for (double& e : g) e = -e;
  return g;
}

/// Sequence of per-segment activation sets on the common refinement of kinks
/// and target breaks; any change marks a non-smooth point of the field.
inline std::vector<char> pattern_signature(const ParamVector& theta, const Target& target,
                                           const DomainMeasure& dom) {
  std::vector<char> sig;
  for (const AffineSegment& s : affine_segments(theta, target, dom)) {
    sig.insert(sig.end(), s.active.begin(), s.active.end());
    sig.push_back(2);
  }
  return sig;
}

namespace detail {

// Dormand-Prince 5(4).
struct DormandPrince {
  static constexpr std::array<double, 7> c{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr std::array<double, 7> e{71.0 / 57600,  0.0,         -71.0 / 16695, 71.0 / 1920,
                                           -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
};

class FlowStepper {
 public:
  FlowStepper(const Target& target, const DomainMeasure& dom, const FlowConfig& cfg)
      : target_(target), dom_(dom), cfg_(cfg) {}

  struct Step {
    ParamVector y;
    RiskReport rep;  // at y; rep.gradient is -k7 (FSAL)
    double err;      // scaled max-norm error estimate
    double dissipated;       // int |G|^2 over the step
    double integrated_risk;  // int L over the step
  };

  // rep0 is the report at y0 (k1 = -rep0.gradient).
  Step attempt(const ParamVector& y0, const RiskReport& rep0, double h) const {
    using DP = DormandPrince;
    const std::size_t n = y0.size();
    std::array<std::vector<double>, 7> k;
    std::array<double, 6> g2{};
    std::array<double, 6> risk{};
    k[0].resize(n);
    for (std::size_t m = 0; m < n; ++m) k[0][m] = -rep0.gradient[m];
    g2[0] = rep0.grad_norm * rep0.grad_norm;
    risk[0] = rep0.risk;
    ParamVector stage = y0;
    for (std::size_t s = 1; s < 6; ++s) {
      for (std::size_t m = 0; m < n; ++m) {
        double acc = 0.0;
        for (std::size_t q = 0; q < s; ++q) acc += DP::a[s][q] * k[q][m];
        stage[m] = y0[m] + h * acc;
      }
      RiskReport r = evaluate(stage, target_, dom_);
      k[s].resize(n);
      for (std::size_t m = 0; m < n; ++m) k[s][m] = -r.gradient[m];
      g2[s] = r.grad_norm * r.grad_norm;
      risk[s] = r.risk;
    }
    double dissipated = 0.0;
    double integrated_risk = 0.0;
    for (std::size_t q = 0; q < 6; ++q) {
      dissipated += h * DP::a[6][q] * g2[q];
      integrated_risk += h * DP::a[6][q] * risk[q];
    }
    ParamVector y = y0;
    for (std::size_t m = 0; m < n; ++m) {
      double acc = 0.0;
      for (std::size_t q = 0; q < 6; ++q) acc += DP::a[6][q] * k[q][m];
      y[m] = y0[m] + h * acc;
    }
    RiskReport rep = evaluate(y, target_, dom_);
    k[6].resize(n);
    for (std::size_t m = 0; m < n; ++m) k[6][m] = -rep.gradient[m];
    double err = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      double acc = 0.0;
      for (std::size_t q = 0; q < 7; ++q) acc += DP::e[q] * k[q][m];
      const double scale = cfg_.rk_tol * (1.0 + std::max(std::abs(y0[m]), std::abs(y[m])));
      err = std::max(err, std::abs(h * acc) / scale);
    }
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    return {std::move(y), std::move(rep), err, dissipated, integrated_risk};
  }

 private:
  const Target& target_;
  const DomainMeasure& dom_;
  const FlowConfig& cfg_;
};

inline std::string describe_state(const ParamVector& theta) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t k = 0; k < theta.size(); ++k) os << (k ? ", " : "") << theta[k];
  os << "]";
  return os.str();
}

}  // namespace detail

/// Adaptive Dormand-Prince integration of the gradient flow with pattern-change
/// events. Monitors are recorded at every accepted step.
inline Trajectory integrate(const ParamVector& theta0, const Target& target, const DomainMeasure& dom,
                            const FlowConfig& cfg) {
  require_1d(theta0.shape(), "integrate");
  cfg.validate();
  target.require_matches(dom);
  if (!theta0.is_finite()) throw SolverError("non-finite initial state", 0.0, theta0);

  Trajectory traj;
  traj.shape = theta0.shape();
  traj.xi = cfg.xi.value_or(target_mean(target));

  detail::FlowStepper stepper(target, dom, cfg);
  ParamVector y = theta0;
  RiskReport rep = evaluate(y, target, dom);
  traj.record(0.0, y, rep);

  double dissipated = 0.0;
  double integrated_risk = 0.0;
  std::vector<char> sig = pattern_signature(y, target, dom);

  double t = 0.0;
  double h = cfg.dt_init;
  std::size_t steps = 0;
  while (t < cfg.t_end) {
    if (++steps > cfg.max_steps) {
      throw SolverError("step budget exhausted at t = " + std::to_string(t), t, y);
    }
    if (rep.grad_norm == 0.0) {
      // Stationary point: the flow stays put.
      traj.record(cfg.t_end, y, rep, dissipated, integrated_risk + (cfg.t_end - t) * rep.risk);
      break;
    }
    const bool last = t + h >= cfg.t_end;
    const double h_try = last ? cfg.t_end - t : h;
    detail::FlowStepper::Step step = stepper.attempt(y, rep, h_try);
    const double factor =
        step.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(step.err, -0.2), 0.2, 5.0);
    if (step.err > 1.0) {
      ++traj.rejected;
      h = h_try * std::min(factor, 0.9);
      if (h < cfg.dt_min) {
        throw SolverError("step size underflow (dt = " + std::to_string(h) + ") at t = " +
                              std::to_string(t) + ", state " + detail::describe_state(y),
                          t, y);
      }
      continue;
    }
    double h_taken = h_try;
    std::vector<char> new_sig = pattern_signature(step.y, target, dom);
    if (new_sig != sig) {
      // Shrink onto the first pattern change.
      double lo = 0.0;
      double hi = h_try;
      detail::FlowStepper::Step hi_step = std::move(step);
      std::vector<char> hi_sig = std::move(new_sig);
      while (hi - lo > cfg.event_tol) {
        const double mid = 0.5 * (lo + hi);
        detail::FlowStepper::Step probe = stepper.attempt(y, rep, mid);
        std::vector<char> probe_sig = pattern_signature(probe.y, target, dom);
        if (probe_sig == sig) {
          lo = mid;
        } else {
          hi = mid;
          hi_step = std::move(probe);
          hi_sig = std::move(probe_sig);
        }
      }
      step = std::move(hi_step);
      new_sig = std::move(hi_sig);
      h_taken = hi;
      ++traj.events;
    }
    if (!step.y.is_finite() || !std::isfinite(step.rep.risk)) {
      throw SolverError("non-finite state at t = " + std::to_string(t), t, y);
    }
    y = std::move(step.y);
    rep = std::move(step.rep);
    sig = std::move(new_sig);
    t = (last && h_taken == h_try) ? cfg.t_end : t + h_taken;
    dissipated += step.dissipated;
    integrated_risk += step.integrated_risk;
    traj.record(t, y, rep, dissipated, integrated_risk);
    if (!(last && h_taken == h_try)) h = std::min(h_try * factor, cfg.dt_max);
    h = std::min(std::max(h, cfg.dt_min), cfg.dt_max);
  }
  return traj;
}

namespace detail {

/// Trapezoid running integral of `values` on `times`.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& times,
                                                const std::vector<double>& values) {
  std::vector<double> out(times.size(), 0.0);
  for (std::size_t k = 1; k < times.size(); ++k) {
    out[k] = out[k - 1] + 0.5 * (times[k] - times[k - 1]) * (values[k] + values[k - 1]);
  }
  return out;
}

}  // namespace detail

/// max_t |L(t) - L(0) + int_0^t |G|^2 ds| with the integral carried by the solver.
inline double energy_residual(const Trajectory& traj) {
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    worst = std::max(worst, std::abs(traj.risk[k] - traj.risk[0] + traj.dissipation[k]));
  }
  return worst;
}

/// Same residual with the integral re-derived by trapezoid on the recorded grid.
inline double energy_residual_trapezoid(const Trajectory& traj) {
  std::vector<double> g2(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) g2[k] = traj.grad_norm[k] * traj.grad_norm[k];
  const std::vector<double> dissipated = detail::cumulative_trapezoid(traj.times, g2);
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    worst = std::max(worst, std::abs(traj.risk[k] - traj.risk[0] + dissipated[k]));
  }
  return worst;
}

/// Largest relative drift max_t |W_i(t) - W_i(0)| / (1 + |W_i(0)|) over neurons.
inline double balancedness_drift(const Trajectory& traj) {
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.shape.H; ++i) {
    const double w0 = traj.W.front()[i];
    for (const auto& row : traj.W) worst = std::max(worst, std::abs(row[i] - w0) / (1.0 + std::abs(w0)));
  }
  return worst;
}

/// Largest increase of the risk between consecutive samples.
inline double max_risk_increase(const Trajectory& traj) {
  double worst = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) worst = std::max(worst, traj.risk[k] - traj.risk[k - 1]);
  return worst;
}

struct LyapunovCheck {
  double max_violation;
  bool ok;
};

/// V(theta_t) <= V(theta_0) + 4 int_0^t (nu - L(theta_s)) ds with nu = rho int (f - xi)^2.
inline LyapunovCheck lyapunov_check(const Trajectory& traj, const Target& target, const DomainMeasure& dom,
                                    double xi) {
  const double nu = constant_fit_risk(target, dom, xi);
  std::vector<double> budget(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) budget[k] = nu * traj.times[k] - traj.risk_integral[k];
  const double v0 = lyapunov(traj.initial(), xi);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    worst = std::max(worst, lyapunov(traj.params[k], xi) - (v0 + 4.0 * budget[k]));
  }
  return {worst, worst <= 1e-6 * (1.0 + v0)};
}

struct BoundednessCheck {
  double bound;
  /// max |theta_t| over recorded t > 0 with L(theta_t) >= nu; 0 when no such t.
  double max_norm_while_above;
  bool any_above;
  bool ok;
};

/// |theta_t| <= 3 |theta_0|^2 + 8 xi^2 while L(theta_t) >= nu.
inline BoundednessCheck boundedness_check(const Trajectory& traj, const Target& target,
                                          const DomainMeasure& dom, double xi) {
  const double nu = constant_fit_risk(target, dom, xi);
  const double bound = 3.0 * squared_norm(traj.initial().values()) + 8.0 * xi * xi;
  BoundednessCheck out{bound, 0.0, false, true};
  for (std::size_t k = 1; k < traj.size(); ++k) {
    if (traj.risk[k] < nu) continue;
    out.any_above = true;
    out.max_norm_while_above = std::max(out.max_norm_while_above, norm(traj.params[k].values()));
  }
  out.ok = !out.any_above || out.max_norm_while_above <= bound * (1.0 + 1e-9);
  return out;
}

struct LimsupCheck {
  double terminal_risk;
  double const_bound;
  bool ok;
};

/// Terminal risk against the best constant approximation (finite-horizon proxy).
inline LimsupCheck limsup_bound_check(const Trajectory& traj, const Target& target, const DomainMeasure& dom) {
  const double bound = constant_fit_risk(target, dom, target_mean(target));
  return {traj.risk.back(), bound, traj.risk.back() <= bound + 1e-8};
}

}  // namespace relugf
