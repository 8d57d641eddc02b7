#pragma once

// Closed-form risk and generalized gradient for d = 1.
//
// On every AffineSegment the residual N - f is affine, so all integrals reduce
// to moments of degree <= 2 polynomials. Moments are taken about the segment
// midpoint: with x = m + u, u in [-h, h], and residual g1 u + g0,
//   int res^2   = 2h (g0^2 + g1^2 h^2 / 3)
//   int res     = 2h g0
//   int x res   = 2h (m g0 + g1 h^2 / 3)
// which keeps the squared-residual integral a sum of non-negative terms.

#include <cmath>
#include <cstddef>
#include <vector>

#include "relugf/model.hpp"

namespace relugf {

struct RiskReport {
  double risk = 0.0;
  std::vector<double> gradient;
  double grad_norm = 0.0;
};

namespace detail {

struct SegmentMoments {
  double sq;     // int res^2
  double one;    // int res
  double first;  // int x res
};

inline SegmentMoments residual_moments(const AffineSegment& s) {
  const double m = 0.5 * (s.lo + s.hi);
  const double h = 0.5 * (s.hi - s.lo);
  const double g1 = s.net_slope - s.target_slope;
  const double g0 = (s.net_slope * m + s.net_intercept) - (s.target_slope * m + s.target_intercept);
  const double h2_3 = h * h / 3.0;
  return {2.0 * h * (g0 * g0 + g1 * g1 * h2_3), 2.0 * h * g0, 2.0 * h * (m * g0 + g1 * h2_3)};
}

}  // namespace detail

inline RiskReport evaluate(const ParamVector& theta, const Target& target, const DomainMeasure& dom) {
  require_1d(theta.shape(), "evaluate");
  const NetworkShape& shape = theta.shape();
  const std::size_t H = shape.H;
  RiskReport rep;
  rep.gradient.assign(shape.dim(), 0.0);
  std::vector<double> x_res(H, 0.0);  // int_{I_i} x res
  std::vector<double> res(H, 0.0);    // int_{I_i} res
  double total_res = 0.0;
  double total_sq = 0.0;

  for (const AffineSegment& s : affine_segments(theta, target, dom)) {
    const detail::SegmentMoments mom = detail::residual_moments(s);
    total_sq += mom.sq;
    total_res += mom.one;
    for (std::size_t i = 0; i < H; ++i) {
      if (!s.active[i]) continue;
      x_res[i] += mom.first;
      res[i] += mom.one;
    }
  }

  const double two_rho = 2.0 * dom.rho;
  for (std::size_t i = 0; i < H; ++i) {
    rep.gradient[shape.w_index(i, 0)] = two_rho * theta.v(i) * x_res[i];
    rep.gradient[shape.b_index(i)] = two_rho * theta.v(i) * res[i];
    // max{w x + b, 0} vanishes off I_i.
    rep.gradient[shape.v_index(i)] = two_rho * (theta.w(i) * x_res[i] + theta.b(i) * res[i]);
  }
  rep.gradient[shape.c_index()] = two_rho * total_res;
  rep.risk = dom.rho * total_sq;
  rep.grad_norm = norm(rep.gradient);
  return rep;
}

inline double risk(const ParamVector& theta, const Target& target, const DomainMeasure& dom) {
  require_1d(theta.shape(), "risk");
  double total = 0.0;
  for (const AffineSegment& s : affine_segments(theta, target, dom)) {
    total += detail::residual_moments(s).sq;
  }
  return dom.rho * total;
}

inline std::vector<double> gradient(const ParamVector& theta, const Target& target,
                                    const DomainMeasure& dom) {
  return evaluate(theta, target, dom).gradient;
}

/// Central differences of the exact risk.
inline std::vector<double> finite_difference_gradient(const ParamVector& theta, const Target& target,
                                                      const DomainMeasure& dom, double h) {
  require_1d(theta.shape(), "finite_difference_gradient");
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: h must be positive");
  std::vector<double> out(theta.size());
  ParamVector probe = theta;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    probe[k] = theta[k] + h;
    const double up = risk(probe, target, dom);
    probe[k] = theta[k] - h;
    const double down = risk(probe, target, dom);
    probe[k] = theta[k];
    out[k] = (up - down) / (2.0 * h);
  }
  return out;
}

/// L(theta) * sum_i |v_i| 1{|b_i| + |w_i| = 0} == 0: the risk is differentiable.
inline bool satisfies_differentiability_condition(const ParamVector& theta, double risk_value) {
  if (risk_value == 0.0) return true;
  for (std::size_t i = 0; i < theta.shape().H; ++i) {
    const double mag = std::abs(theta.b(i)) + norm(theta.w_row(i));
    if (mag == 0.0 && theta.v(i) != 0.0) return false;
  }
  return true;
}

enum class FdVerdict { agree, disagree, excluded };

inline const char* to_string(FdVerdict v) {
  switch (v) {
    case FdVerdict::agree: return "agree";
    case FdVerdict::disagree: return "disagree";
    case FdVerdict::excluded: return "excluded";
  }
  return "?";
}

struct FdComparison {
  FdVerdict verdict;
  double max_deviation;
  double tolerance;
};

/// Compare G against central differences with tolerance max(atol, rtol |G|).
/// At non-differentiable parameters the verdict is `excluded`, never an error.
inline FdComparison compare_with_finite_differences(const ParamVector& theta, const Target& target,
                                                    const DomainMeasure& dom, double h = 1e-6,
                                                    double atol = 1e-5, double rtol = 1e-4) {
  const RiskReport rep = evaluate(theta, target, dom);
  const std::vector<double> fd = finite_difference_gradient(theta, target, dom, h);
  double dev = 0.0;
  for (std::size_t k = 0; k < fd.size(); ++k) dev = std::max(dev, std::abs(fd[k] - rep.gradient[k]));
  const double tol = std::max(atol, rtol * rep.grad_norm);
  if (!satisfies_differentiability_condition(theta, rep.risk)) return {FdVerdict::excluded, dev, tol};
  return {dev <= tol ? FdVerdict::agree : FdVerdict::disagree, dev, tol};
}

struct GradientBoundCheck {
  double lhs;
  double rhs;
  bool ok;
};

/// |G|^2 <= 4 L (A^2 (d + 1) |theta|^2 + 1) mu([a, b]), A = max{|a|, |b|, 1}.
inline GradientBoundCheck gradient_norm_bound_check(const ParamVector& theta, const Target& target,
                                                    const DomainMeasure& dom) {
  const RiskReport rep = evaluate(theta, target, dom);
  const double A = std::max({std::abs(dom.a), std::abs(dom.b), 1.0});
  const double d = static_cast<double>(theta.shape().d);
  const double lhs = rep.grad_norm * rep.grad_norm;
  const double rhs =
      4.0 * rep.risk * (A * A * (d + 1.0) * squared_norm(theta.values()) + 1.0) * dom.mass(1);
  return {lhs, rhs, lhs <= rhs * (1.0 + 1e-12)};
}

/// Mean of the target over the domain.
inline double target_mean(const Target& target) {
  double integral = 0.0;
  for (const Target::Piece& p : target.pieces()) {
    integral += p.slope * 0.5 * (p.hi * p.hi - p.lo * p.lo) + p.intercept * (p.hi - p.lo);
  }
  return integral / (target.hi() - target.lo());
}

/// rho * int (f - xi)^2, exact per piece.
inline double constant_fit_risk(const Target& target, const DomainMeasure& dom, double xi) {
  target.require_matches(dom);
  double total = 0.0;
  for (const Target::Piece& p : target.pieces()) {
    const double m = 0.5 * (p.lo + p.hi);
    const double h = 0.5 * (p.hi - p.lo);
    const double g0 = p(m) - xi;
    total += 2.0 * h * (g0 * g0 + p.slope * p.slope * h * h / 3.0);
  }
  return dom.rho * total;
}

}  // namespace relugf
