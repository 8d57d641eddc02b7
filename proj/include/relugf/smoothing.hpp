#pragma once

// C^1 surrogates R_r of the ReLU and the risks built from them.
//
// R_r vanishes on (-inf, 1/(2r)], is the identity on [1/r, inf), and is the
// cubic Hermite interpolant of (1/(2r), 0, 0) and (1/r, 1/r, 1) in between.
// With t = (x - 1/(2r)) / (1/(2r)) the window reads
//   R_r = (5 t^2 - 3 t^3) / (2r),   R_r' = 10 t - 9 t^2,
// so 0 <= R_r <= max{x, 0}, R_r increases to max{x, 0} as r grows, R_r'(0) = 0,
// and 0 <= R_r' <= 25/9.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "relugf/model.hpp"
#include "relugf/quadrature.hpp"

namespace relugf {

struct SmoothActivation {
  unsigned long r = 1;

  explicit SmoothActivation(unsigned long r_) : r(r_) {
    if (r == 0) throw std::invalid_argument("SmoothActivation: r must be positive");
  }

  double window_lo() const { return 0.5 / static_cast<double>(r); }
  double window_hi() const { return 1.0 / static_cast<double>(r); }
};

/// Upper bound of R_r' over the real line.
inline constexpr double kSmoothDerivMax = 25.0 / 9.0;

inline double smoothed_value(const SmoothActivation& act, double x) {
  const double x0 = act.window_lo();
  if (x <= x0) return 0.0;
  if (x >= act.window_hi()) return x;
  const double t = (x - x0) / x0;
  return x0 * t * t * (5.0 - 3.0 * t);
}

inline double smoothed_deriv(const SmoothActivation& act, double x) {
  const double x0 = act.window_lo();
  if (x <= x0) return 0.0;
  if (x >= act.window_hi()) return 1.0;
  const double t = (x - x0) / x0;
  return t * (10.0 - 9.0 * t);
}

namespace detail {

/// Panel boundaries: domain ends, target breaks, and the preimages of both
/// window joints for every neuron, so each panel integrand is a polynomial.
inline std::vector<double> smoothing_cuts(const ParamVector& theta, const Target& target,
                                          const DomainMeasure& dom, const SmoothActivation& act) {
  std::vector<double> cuts{dom.a, dom.b};
  for (double x : target.breaks()) cuts.push_back(x);
  for (std::size_t i = 0; i < theta.shape().H; ++i) {
    const double w = theta.w(i);
    if (w == 0.0) continue;
    for (double z : {act.window_lo(), act.window_hi()}) {
      const double x = (z - theta.b(i)) / w;
      if (x > dom.a && x < dom.b) cuts.push_back(x);
    }
  }
  sort_and_merge(cuts, kKinkMergeTol);
  return cuts;
}

inline double smoothed_realization(const ParamVector& theta, const SmoothActivation& act, double x) {
  double out = theta.c();
  for (std::size_t i = 0; i < theta.shape().H; ++i) {
    out += theta.v(i) * smoothed_value(act, preactivation(theta, i, x));
  }
  return out;
}

}  // namespace detail

/// rho * int (f - c - sum_i v_i R_r(w_i x + b_i))^2 dx by adaptive Gauss-Legendre.
inline double smoothed_risk(const ParamVector& theta, const Target& target, const DomainMeasure& dom,
                            unsigned long r) {
  require_1d(theta.shape(), "smoothed_risk");
  target.require_matches(dom);
  const SmoothActivation act(r);
  const std::vector<double> cuts = detail::smoothing_cuts(theta, target, dom, act);
  const QuadratureOptions opt{1e-12, 1e-15, 48};
  const double total = integrate_adaptive(
      [&](double x) {
        const double e = detail::smoothed_realization(theta, act, x) - target(x);
        return e * e;
      },
      cuts, opt);
  return dom.rho * total;
}

/// Chain-rule gradient of smoothed_risk, integrated on the same panels.
inline std::vector<double> smoothed_gradient(const ParamVector& theta, const Target& target,
                                             const DomainMeasure& dom, unsigned long r) {
  require_1d(theta.shape(), "smoothed_gradient");
  target.require_matches(dom);
  const SmoothActivation act(r);
  const NetworkShape& shape = theta.shape();
  const std::size_t H = shape.H;
  const std::vector<double> cuts = detail::smoothing_cuts(theta, target, dom, act);
  std::vector<double> grad(shape.dim(), 0.0);
  auto integrand = [&](double x, std::span<double> out) {
    double net = theta.c();
    for (std::size_t i = 0; i < H; ++i) net += theta.v(i) * smoothed_value(act, preactivation(theta, i, x));
    const double res = net - target(x);
    for (std::size_t i = 0; i < H; ++i) {
      const double z = preactivation(theta, i, x);
      const double slope = theta.v(i) * smoothed_deriv(act, z) * res;
      out[shape.w_index(i, 0)] = slope * x;
      out[shape.b_index(i)] = slope;
      out[shape.v_index(i)] = smoothed_value(act, z) * res;
    }
    out[shape.c_index()] = res;
  };
  const QuadratureOptions opt{1e-13, 1e-15, 48};
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    integrate_adaptive(integrand, cuts[k], cuts[k + 1], std::span<double>(grad), opt);
  }
  for (double& g : grad) g *= 2.0 * dom.rho;
  return grad;
}

}  // namespace relugf
