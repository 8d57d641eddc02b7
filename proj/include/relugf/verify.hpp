#pragma once

// Property sweeps behind `relugf verify`. Each property reports the number of
// cases it looked at, the worst deviation it saw, and whether that deviation
// stayed inside the property's tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "relugf/csv.hpp"
#include "relugf/exact_risk.hpp"
#include "relugf/flow.hpp"
#include "relugf/highdim.hpp"
#include "relugf/model.hpp"
#include "relugf/quadrature.hpp"
#include "relugf/smoothing.hpp"
#include "relugf/theory.hpp"

namespace relugf {

struct PropertyResult {
  std::string name;
  std::size_t cases = 0;
  double max_dev = 0.0;
  bool pass = true;
};

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{"gradient", "smoothing", "flow", "theory", "highdim", "all"};
  return names;
}

namespace verify_detail {

/// One random d = 1 problem: parameters, affine target and domain.
struct Instance {
  ParamVector theta;
  Target target;
  DomainMeasure dom;
};

/// Draws for case `k` of a property come from the (seed, tag) stream at
/// indices k * 64 + slot, so properties never share random numbers.
class Draws {
 public:
  Draws(std::uint64_t seed, std::uint32_t tag, std::size_t k) : rng_(seed, tag), base_(k * 64) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(base_ + next_++); }
  double normal() { return rng_.normal(base_ + next_++); }
  std::size_t pick(std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(rng_.uniform(base_ + next_++) * static_cast<double>(n)));
  }

 private:
  CounterRng rng_;
  std::uint64_t base_;
  std::uint64_t next_ = 0;
};

inline Instance random_instance(Draws& dr, std::size_t H, double scale = 1.0) {
  const double a = dr.uniform(-1.0, 0.5);
  const DomainMeasure dom(a, a + dr.uniform(0.5, 2.0), dr.uniform(0.5, 2.0));
  const double alpha = dr.uniform(-2.0, 2.0);
  const double beta = dr.uniform(-1.0, 1.0);
  ParamVector theta(NetworkShape(1, H));
  for (std::size_t k = 0; k < theta.size(); ++k) theta[k] = scale * dr.normal();
  return {std::move(theta), Target::affine(alpha, beta, dom), dom};
}

/// Panel cuts for pointwise quadrature: domain ends, kinks, target breaks.
inline std::vector<double> oracle_cuts(const ParamVector& theta, const Target& target, const DomainMeasure& dom) {
  std::vector<double> cuts = target.breaks();
  cuts.push_back(dom.a);
  cuts.push_back(dom.b);
  for (std::size_t i = 0; i < theta.shape().H; ++i) {
    if (theta.w(i, 0) == 0.0) continue;
    const double x = -theta.b(i) / theta.w(i, 0);
    if (x > dom.a && x < dom.b) cuts.push_back(x);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

/// Risk and the gradient integrands evaluated pointwise and integrated by
/// adaptive Gauss-Legendre: index 0 is the risk, 1.. the gradient.
inline std::vector<double> quadrature_risk_and_gradient(const ParamVector& theta, const Target& target,
                                                        const DomainMeasure& dom) {
  const NetworkShape& shape = theta.shape();
  std::vector<double> acc(shape.dim() + 1, 0.0);
  auto integrand = [&](double x, std::span<double> out) {
    const double res = realization(theta, x) - target(x);
    out[0] = res * res;
    for (std::size_t i = 0; i < shape.H; ++i) {
      const double z = preactivation(theta, i, x);
      const double on = z > 0.0 ? 2.0 * theta.v(i) * res : 0.0;
      out[1 + shape.w_index(i, 0)] = on * x;
      out[1 + shape.b_index(i)] = on;
      out[1 + shape.v_index(i)] = 2.0 * std::max(z, 0.0) * res;
    }
    out[1 + shape.c_index()] = 2.0 * res;
  };
  const std::vector<double> cuts = oracle_cuts(theta, target, dom);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    integrate_adaptive(integrand, cuts[k], cuts[k + 1], std::span<double>(acc), {1e-15, 1e-15, 40});
  }
  for (double& e : acc) e *= dom.rho;
  return acc;
}

/// Fixed-step explicit Euler on theta' = -G(theta).
inline ParamVector euler_oracle(ParamVector theta, const Target& target, const DomainMeasure& dom, double t_end,
                                double dt) {
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  for (std::size_t s = 0; s < steps; ++s) {
    const std::vector<double> g = gradient(theta, target, dom);
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= dt * g[k];
  }
  return theta;
}

/// Smallest rtol for which |x - y| <= 1e-12 + rtol max(|x|, |y|) holds.
inline double rel_dev(double x, double y, double rtol = 1e-12) {
  return std::abs(x - y) / (1e-12 / rtol + std::max(std::abs(x), std::abs(y)));
}

/// Runs fn(k) for k < n on a small worker pool; results land at index k.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F fn) {
  std::vector<T> out(n);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) out[k] = fn(k);
    return out;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < n; k += workers) out[k] = fn(k);
    });
  }
  pool.clear();
  return out;
}

struct Tally {
  PropertyResult r;
  double tol;
  Tally(std::string name, double tol_) : r{std::move(name), 0, 0.0, true}, tol(tol_) {}
  void add(double dev) {
    ++r.cases;
    if (std::isnan(dev)) dev = std::numeric_limits<double>::infinity();
    r.max_dev = std::max(r.max_dev, dev);
    r.pass = r.pass && dev <= tol;
  }
  PropertyResult done() const { return r; }
};

constexpr std::size_t kWidths[] = {1, 2, 4, 8};

}  // namespace verify_detail

/// Closed form against pointwise quadrature, finite differences, the gradient
/// bound, density scaling and lower semicontinuity on the degenerate set.
inline std::vector<PropertyResult> verify_gradient(std::uint64_t seed, std::size_t n) {
  using namespace verify_detail;
  Tally risk_q("gradient.risk_vs_quadrature", 1e-10);
  Tally grad_q("gradient.gradient_vs_quadrature", 1e-9);
  Tally fd("gradient.finite_differences", 1.0);
  Tally bound("gradient.norm_bound", 1.0 + 1e-12);
  Tally scaling("gradient.density_scaling", 1e-12);
  Tally lsc("gradient.lower_semicontinuity", 1e-8);
  for (std::size_t k = 0; k < n; ++k) {
    Draws dr(seed, 0x67726164u, k);
    const Instance in = random_instance(dr, kWidths[k % 4]);
    const RiskReport rep = evaluate(in.theta, in.target, in.dom);
    const std::vector<double> q = quadrature_risk_and_gradient(in.theta, in.target, in.dom);
    risk_q.add(rel_dev(rep.risk, q[0], 1e-10));
    double gdev = 0.0;
    for (std::size_t c = 0; c < rep.gradient.size(); ++c) gdev = std::max(gdev, rel_dev(rep.gradient[c], q[c + 1], 1e-9));
    grad_q.add(gdev);

    const FdComparison cmp = compare_with_finite_differences(in.theta, in.target, in.dom);
    if (cmp.verdict != FdVerdict::excluded) fd.add(cmp.max_deviation / cmp.tolerance);

    const GradientBoundCheck gb = gradient_norm_bound_check(in.theta, in.target, in.dom);
    bound.add(gb.rhs > 0.0 ? gb.lhs / gb.rhs : (gb.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));

    const DomainMeasure dense(in.dom.a, in.dom.b, 2.0 * in.dom.rho);
    const RiskReport rep2 = evaluate(in.theta, in.target, dense);
    double sdev = rel_dev(rep2.risk, 2.0 * rep.risk);
    for (std::size_t c = 0; c < rep.gradient.size(); ++c) {
      sdev = std::max(sdev, std::abs(rep2.gradient[c] - 2.0 * rep.gradient[c]) / (1e-12 + 2.0 * rep.grad_norm));
    }
    scaling.add(sdev);

    // Kill neuron 0 (w = b = 0, v != 0) and approach along a random direction.
    ParamVector degenerate = in.theta;
    degenerate.w(0, 0) = 0.0;
    degenerate.b(0) = 0.0;
    if (degenerate.v(0) == 0.0) degenerate.v(0) = 1.0;
    const double g0 = evaluate(degenerate, in.target, in.dom).grad_norm;
    std::vector<double> dir(in.theta.size());
    for (double& e : dir) e = dr.normal();
    double tail_min = std::numeric_limits<double>::infinity();
    for (int m = 40; m <= 60; ++m) {
      ParamVector probe = degenerate;
      for (std::size_t c = 0; c < dir.size(); ++c) probe[c] += std::ldexp(dir[c], -m);
      tail_min = std::min(tail_min, evaluate(probe, in.target, in.dom).grad_norm);
    }
    lsc.add(std::max(0.0, g0 - tail_min));
  }
  return {risk_q.done(), grad_q.done(), fd.done(), bound.done(), scaling.done(), lsc.done()};
}

/// Convergence of the smoothed family and of its risks and gradients.
inline std::vector<PropertyResult> verify_smoothing(std::uint64_t seed, std::size_t n) {
  using namespace verify_detail;
  Tally family("smoothing.family_limit", 1e-7);
  Tally deriv_bound("smoothing.derivative_bound", kSmoothDerivMax);
  Tally risk_mono("smoothing.risk_error_monotone", 1e-12);
  Tally grad_mono("smoothing.gradient_error_monotone", 1e-12);
  Tally grad_limit("smoothing.gradient_limit", 1e-2);
  Tally fd("smoothing.finite_differences", 1e-5);

  for (double x : {-1.0, -0.1, 0.0, 0.01, 0.1, 1.0}) {
    const SmoothActivation act(100'000'000ul);
    family.add(std::abs(smoothed_value(act, x) - std::max(x, 0.0)) +
               std::abs(smoothed_deriv(act, x) - (x > 0.0 ? 1.0 : 0.0)));
    for (unsigned long r = 1; r <= 100'000'000ul; r *= 10) {
      deriv_bound.add(std::abs(smoothed_deriv(SmoothActivation(r), x)));
    }
  }

  const unsigned long rs[] = {10, 100, 1000, 10000};
  for (std::size_t k = 0; k < n; ++k) {
    Draws dr(seed, 0x736d6f6fu, k);
    const Instance in = random_instance(dr, kWidths[k % 3]);
    const RiskReport rep = evaluate(in.theta, in.target, in.dom);
    double prev_risk = std::numeric_limits<double>::infinity();
    double prev_grad = std::numeric_limits<double>::infinity();
    double rise_risk = 0.0;
    double rise_grad = 0.0;
    double last_grad = 0.0;
    for (unsigned long r : rs) {
      const double er = std::abs(smoothed_risk(in.theta, in.target, in.dom, r) - rep.risk);
      const std::vector<double> sg = smoothed_gradient(in.theta, in.target, in.dom, r);
      double eg = 0.0;
      for (std::size_t c = 0; c < sg.size(); ++c) eg += (sg[c] - rep.gradient[c]) * (sg[c] - rep.gradient[c]);
      eg = std::sqrt(eg);
      rise_risk = std::max(rise_risk, er - prev_risk);
      rise_grad = std::max(rise_grad, eg - prev_grad);
      prev_risk = er;
      prev_grad = eg;
      last_grad = eg;
    }
    risk_mono.add(std::max(0.0, rise_risk));
    grad_mono.add(std::max(0.0, rise_grad));
    grad_limit.add(last_grad / (1.0 + rep.grad_norm));

    const unsigned long r_fd = k % 2 == 0 ? 10ul : 1000ul;
    const std::vector<double> sg = smoothed_gradient(in.theta, in.target, in.dom, r_fd);
    ParamVector probe = in.theta;
    double dev = 0.0;
    for (std::size_t c = 0; c < probe.size(); ++c) {
      const double h = 1e-6;
      probe[c] = in.theta[c] + h;
      const double up = smoothed_risk(probe, in.target, in.dom, r_fd);
      probe[c] = in.theta[c] - h;
      const double down = smoothed_risk(probe, in.target, in.dom, r_fd);
      probe[c] = in.theta[c];
      dev = std::max(dev, std::abs((up - down) / (2.0 * h) - sg[c]));
    }
    fd.add(dev);
  }
  return {family.done(), deriv_bound.done(), risk_mono.done(), grad_mono.done(), grad_limit.done(), fd.done()};
}

/// A random flow problem of width 1..4 started at normal(0, 1/sqrt(H)) entries.
inline verify_detail::Instance random_flow_instance(std::uint64_t seed, std::size_t k) {
  verify_detail::Draws dr(seed, 0x666c6f77u, k);
  const std::size_t H = 1 + dr.pick(4);
  return verify_detail::random_instance(dr, H, 1.0 / std::sqrt(static_cast<double>(H)));
}

/// Solver quality and the trajectory-level inequalities on random flows.
inline std::vector<PropertyResult> verify_flow(std::uint64_t seed, std::size_t n, double t_end = 100.0) {
  using namespace verify_detail;
  struct Row {
    double drift, energy, monotone, lyap, bounded, limsup;
  };
  const std::vector<Row> rows = parallel_map<Row>(n, [&](std::size_t k) {
    const Instance in = random_flow_instance(seed, k);
    FlowConfig cfg;
    cfg.t_end = t_end;
    const Trajectory tr = integrate(in.theta, in.target, in.dom, cfg);
    const double l0 = tr.risk.front();
    const LyapunovCheck ly = lyapunov_check(tr, in.target, in.dom, tr.xi);
    const BoundednessCheck bd = boundedness_check(tr, in.target, in.dom, tr.xi);
    LimsupCheck ls = limsup_bound_check(tr, in.target, in.dom);
    // The bound concerns t -> infinity and slow runs can sit above it at
    // t_end; the risk is non-increasing, so a longer horizon is still sound.
    for (double longer : {10.0 * t_end, 100.0 * t_end}) {
      if (ls.ok) break;
      cfg.t_end = longer;
      ls = limsup_bound_check(integrate(in.theta, in.target, in.dom, cfg), in.target, in.dom);
    }
    return Row{balancedness_drift(tr),
               energy_residual(tr) / (1.0 + l0),
               max_risk_increase(tr) / (1.0 + l0),
               ly.max_violation / (1.0 + lyapunov(tr.initial(), tr.xi)),
               bd.any_above ? bd.max_norm_while_above / bd.bound : 0.0,
               ls.terminal_risk - ls.const_bound};
  });
  Tally drift("flow.conservation", 1e-8);
  Tally energy("flow.energy_identity", 1e-6);
  Tally mono("flow.monotone_risk", 1e-10);
  Tally lyap("flow.lyapunov", 1e-6);
  Tally bounded("flow.boundedness", 1.0 + 1e-9);
  Tally limsup("flow.limsup_bound", 1e-8);
  for (const Row& r : rows) {
    drift.add(r.drift);
    energy.add(r.energy);
    mono.add(r.monotone);
    lyap.add(r.lyap);
    bounded.add(r.bounded);
    limsup.add(r.limsup);
  }

  Tally euler("flow.euler_oracle", 1e-4);
  const std::size_t n_euler = std::min<std::size_t>(n, 5);
  const std::vector<double> edev = parallel_map<double>(n_euler, [&](std::size_t k) {
    const Instance in = random_flow_instance(seed, k);
    FlowConfig cfg;
    cfg.t_end = 1.0;
    const Trajectory tr = integrate(in.theta, in.target, in.dom, cfg);
    const ParamVector ref = euler_oracle(in.theta, in.target, in.dom, 1.0, 1e-5);
    double d2 = 0.0;
    for (std::size_t c = 0; c < ref.size(); ++c) d2 += std::pow(tr.final().values()[c] - ref[c], 2);
    return std::sqrt(d2);
  });
  for (double d : edev) euler.add(d);
  return {drift.done(), energy.done(), mono.done(), lyap.done(), bounded.done(), limsup.done(), euler.done()};
}

/// Counts violations of the H = 1 structure results among random parameters.
struct SmallRiskSweep {
  std::size_t sign_cases = 0, sign_violations = 0;
  std::size_t active_cases = 0, active_violations = 0;
  std::size_t slope_cases = 0, slope_violations = 0;
  double max_slope_product = 0.0;
};

inline SmallRiskSweep small_risk_sweep(std::uint64_t seed, std::size_t n) {
  SmallRiskSweep out;
  const DomainMeasure dom(0.0, 1.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    verify_detail::Draws dr(seed, 0x736d6c6cu, k);
    // Output bias centred on the target mean so that a fair share of draws has small risk.
    const ParamVector theta = ParamVector::single(dr.normal(), dr.normal(), dr.normal(), 0.5 + 0.5 * dr.normal());
    const SmallRiskReport rep = small_risk_diagnostics(theta, 1.0, 0.0, dom);
    if (rep.sign != Verdict::not_applicable) {
      ++out.sign_cases;
      out.sign_violations += rep.sign == Verdict::violated;
    }
    if (rep.active != Verdict::not_applicable) {
      ++out.active_cases;
      out.active_violations += rep.active == Verdict::violated;
    }
    if (rep.slope != Verdict::not_applicable) {
      ++out.slope_cases;
      out.slope_violations += rep.slope == Verdict::violated;
      out.max_slope_product = std::max(out.max_slope_product, rep.slope_product);
    }
  }
  return out;
}

inline std::vector<PropertyResult> verify_theory(std::uint64_t seed, std::size_t n) {
  using namespace verify_detail;
  Tally ladder("theory.ladder_ordering", 1e-14);
  Tally constant("theory.best_constant_affine", 1e-12);
  Tally moments("theory.affine_moment_uniqueness", 1e-9);
  for (std::size_t k = 0; k < n; ++k) {
    Draws dr(seed, 0x74686579u, k);
    const std::size_t H = 1 + dr.pick(8);
    const double a = dr.uniform(-2.0, 1.0);
    const DomainMeasure dom(a, a + dr.uniform(0.1, 3.0), dr.uniform(0.1, 3.0));
    const double alpha = dr.uniform(-3.0, 3.0);
    const double beta = dr.uniform(-3.0, 3.0);

    const RiskLadder lad = critical_ladder(H, alpha, dom);
    double dev = 0.0;
    for (std::size_t r = 1; r < lad.rungs.size(); ++r) {
      if (!(lad.rungs[r].value < lad.rungs[r - 1].value)) dev = std::numeric_limits<double>::infinity();
    }
    const double nmax = 2.0 * static_cast<double>(H / 2) + 1.0;
    const double expect = dom.rho * alpha * alpha * std::pow(dom.length(), 3) / (12.0 * std::pow(nmax, 4));
    ladder.add(std::max(dev, rel_dev(lad.min_positive(), expect)));

    const Target f = Target::affine(alpha, beta, dom);
    constant.add(rel_dev(best_constant_risk(f, dom), affine_constant_risk(alpha, dom)));

    const double e1 = dr.normal();
    const double e0 = dr.normal();
    const auto m = affine_moments(e1, e0, dom.a, dom.b);
    const auto back = affine_from_moments(m[0], m[1], dom.a, dom.b);
    const auto zero = affine_from_moments(0.0, 0.0, dom.a, dom.b);
    moments.add(std::max({std::abs(back[0] - e1) / (1.0 + std::abs(e1)), std::abs(back[1] - e0) / (1.0 + std::abs(e0)),
                          std::abs(zero[0]), std::abs(zero[1])}));
  }
  const SmallRiskSweep sw = small_risk_sweep(seed, n);
  auto count = [](std::string name, std::size_t cases, std::size_t bad) {
    return PropertyResult{std::move(name), cases, static_cast<double>(bad), bad == 0};
  };
  return {ladder.done(),
          constant.done(),
          moments.done(),
          count("theory.small_risk_sign", sw.sign_cases, sw.sign_violations),
          count("theory.small_risk_active", sw.active_cases, sw.active_violations),
          count("theory.small_risk_slope", sw.slope_cases, sw.slope_violations)};
}

/// Largest |MC mean - exact| / std_error over the risk and gradient components.
/// Components with zero sample variance must match exactly (up to rounding).
inline double mc_sigma_distance(double mean, double se, double exact) {
  const double diff = std::abs(mean - exact);
  if (se > 0.0) return diff / se;
  return diff <= 1e-12 * (1.0 + std::abs(exact)) ? 0.0 : std::numeric_limits<double>::infinity();
}

inline std::vector<PropertyResult> verify_highdim(std::uint64_t seed, std::size_t n, std::size_t samples = 20000) {
  using namespace verify_detail;
  Tally risk4("highdim.mc_risk_4sigma", 4.0);
  Tally grad4("highdim.mc_gradient_4sigma", 4.0);
  Tally det("highdim.determinism", 0.0);
  Tally bound("highdim.gradient_bound_d2", 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    Draws dr(seed, 0x6d6f6e74u, k);
    const Instance in = random_instance(dr, kWidths[k % 4]);
    const Target& target = in.target;
    const TargetFunction f = [&target](std::span<const double> x) { return target(x[0]); };
    const RiskReport rep = evaluate(in.theta, in.target, in.dom);
    const std::uint64_t mc_seed = seed * 1000003u + k;
    const MCEstimate<double> mr = mc_risk(in.theta, f, in.dom, samples, mc_seed);
    const MCEstimate<std::vector<double>> mg = mc_gradient(in.theta, f, in.dom, samples, mc_seed);
    risk4.add(mc_sigma_distance(mr.mean, mr.std_error, rep.risk));
    double worst = 0.0;
    for (std::size_t c = 0; c < rep.gradient.size(); ++c) {
      worst = std::max(worst, mc_sigma_distance(mg.mean[c], mg.std_error[c], rep.gradient[c]));
    }
    grad4.add(worst);

    const MCEstimate<double> again = mc_risk(in.theta, f, in.dom, samples, mc_seed, {1024, 3});
    const MCEstimate<double> base = mc_risk(in.theta, f, in.dom, samples, mc_seed, {1024, 1});
    det.add(again.mean == base.mean && again.std_error == base.std_error ? 0.0 : 1.0);

    // d = 2: |G|^2 <= 4 L (A^2 (d+1) |theta|^2 + 1) mu, with 5 sigma allowance.
    ParamVector th2(NetworkShape(2, kWidths[k % 4]));
    for (std::size_t c = 0; c < th2.size(); ++c) th2[c] = dr.normal();
    const DomainMeasure box(dr.uniform(-1.0, 0.0), dr.uniform(0.5, 1.5), dr.uniform(0.5, 2.0));
    const double s1 = dr.normal();
    const double s2 = dr.normal();
    const TargetFunction f2 = [s1, s2](std::span<const double> x) { return s1 * x[0] + s2 * x[1]; };
    const MCEstimate<double> r2 = mc_risk(th2, f2, box, samples, mc_seed);
    const MCEstimate<std::vector<double>> g2 = mc_gradient(th2, f2, box, samples, mc_seed);
    double lhs = 0.0;
    for (std::size_t c = 0; c < g2.mean.size(); ++c) {
      const double g = std::max(0.0, std::abs(g2.mean[c]) - 5.0 * g2.std_error[c]);
      lhs += g * g;
    }
    const double A = std::max({std::abs(box.a), std::abs(box.b), 1.0});
    const double rhs = 4.0 * (r2.mean + 5.0 * r2.std_error) * (A * A * 3.0 * squared_norm(th2.values()) + 1.0) *
                       box.mass(2);
    bound.add(rhs > 0.0 ? lhs / rhs : 0.0);
  }
  return {risk4.done(), grad4.done(), det.done(), bound.done()};
}

/// Runs one suite (or "all"); throws std::invalid_argument for unknown names.
inline std::vector<PropertyResult> run_verify_suite(const std::string& suite, std::uint64_t seed, std::size_t n) {
  if (n == 0) throw std::invalid_argument("verify: cases must be positive");
  std::vector<PropertyResult> out;
  auto append = [&out](std::vector<PropertyResult> more) {
    out.insert(out.end(), more.begin(), more.end());
  };
  if (std::find(verify_suites().begin(), verify_suites().end(), suite) == verify_suites().end()) {
    throw std::invalid_argument("verify: unknown suite '" + suite + "'");
  }
  const bool all = suite == "all";
  if (all || suite == "gradient") append(verify_gradient(seed, n));
  if (all || suite == "smoothing") append(verify_smoothing(seed, n));
  if (all || suite == "flow") append(verify_flow(seed, n));
  if (all || suite == "theory") append(verify_theory(seed, n));
  if (all || suite == "highdim") append(verify_highdim(seed, n));
  return out;
}

inline void write_verify_report(std::ostream& os, const std::vector<PropertyResult>& results) {
  os << "property\tcases\tmax_dev\tverdict\n";
  for (const PropertyResult& r : results) {
    os << r.name << '\t' << r.cases << '\t' << format_double(r.max_dev) << '\t' << (r.pass ? "PASS" : "FAIL") << '\n';
  }
}

}  // namespace relugf
