#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "relugf/errors.hpp"
#include "relugf/exact_risk.hpp"
#include "relugf/model.hpp"

namespace relugf {

/// rho * int (f - mean f)^2: the smallest risk of any constant realization.
inline double best_constant_risk(const Target& target, const DomainMeasure& dom) {
  return constant_fit_risk(target, dom, target_mean(target));
}

/// rho alpha^2 (b - a)^3 / 12, the closed form of best_constant_risk for affine targets.
inline double affine_constant_risk(double alpha, const DomainMeasure& dom) {
  const double len = dom.length();
  return dom.rho * alpha * alpha * len * len * len / 12.0;
}

struct Rung {
  /// Even n for rho alpha^2 (b-a)^3 / (12 (n+1)^4); empty for the zero rung.
  std::optional<int> n;
  double value;

  bool is_zero() const { return !n.has_value(); }
  std::string label() const { return n ? std::to_string(*n) : std::string("ZERO"); }
  friend bool operator==(const Rung&, const Rung&) = default;
};

/// Risk values attainable at critical points of an H-neuron network fitted to
/// an affine target: rho alpha^2 (b-a)^3 / (12 (n+1)^4) for even n <= 2 floor(H/2),
/// together with 0. Sorted by decreasing value.
struct RiskLadder {
  std::size_t H = 1;
  double alpha = 0.0;
  DomainMeasure dom;
  std::vector<Rung> rungs;

  /// Smallest positive rung, the bound attained at n = 2 floor(H/2).
  double min_positive() const {
    double m = 0.0;
    for (const Rung& r : rungs) {
      if (r.value > 0.0) m = r.value;
    }
    return m;
  }

  /// Smallest distance between adjacent rungs (infinity for a single rung).
  double min_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < rungs.size(); ++k) g = std::min(g, rungs[k - 1].value - rungs[k].value);
    return g;
  }

  double default_tolerance() const { return std::min(1e-6, min_gap() / 4.0); }
};

inline RiskLadder critical_ladder(std::size_t H, double alpha, const DomainMeasure& dom) {
  if (H == 0) throw DimensionError("critical_ladder: H must be positive");
  RiskLadder ladder{H, alpha, dom, {}};
  const double top = affine_constant_risk(alpha, dom);
  if (top > 0.0) {
    const int n_max = 2 * static_cast<int>(H / 2);
    for (int n = 0; n <= n_max; n += 2) {
      ladder.rungs.push_back({n, top / std::pow(n + 1.0, 4)});
    }
  }
  ladder.rungs.push_back({std::nullopt, 0.0});
  return ladder;
}

/// The unique rung within `tol` of `value`, or nullopt when none is.
inline std::optional<Rung> classify_terminal_risk(double value, const RiskLadder& ladder, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("classify_terminal_risk: tol must be positive");
  std::optional<Rung> hit;
  for (const Rung& r : ladder.rungs) {
    if (std::abs(value - r.value) > tol) continue;
    if (hit) {
      throw AmbiguousClassification("risk " + std::to_string(value) + " is within " + std::to_string(tol) +
                                    " of rungs " + hit->label() + " and " + r.label());
    }
    hit = r;
  }
  return hit;
}

inline std::optional<Rung> classify_terminal_risk(double value, const RiskLadder& ladder) {
  return classify_terminal_risk(value, ladder, ladder.default_tolerance());
}

enum class Verdict { ok, violated, not_applicable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ok: return "ok";
    case Verdict::violated: return "VIOLATED";
    case Verdict::not_applicable: return "n/a";
  }
  return "?";
}

struct SmallRiskReport {
  double risk;
  /// rho alpha^2 (b-a)^3 / 12.
  double threshold;
  /// best_constant_risk; equals `threshold` for affine targets.
  double m;
  /// alpha w v > 0 whenever risk < threshold.
  Verdict sign;
  /// max{w a + b, w b + b} > 0 whenever risk < m.
  Verdict active;
  double slope_product;
  /// (sqrt(m) - sqrt(risk)) / sqrt(rho (b-a)^3), i.e. epsilon = m - risk.
  double slope_lower_bound;
  Verdict slope;
};

/// Structural checks for single-neuron networks with risk below the constant fit.
inline SmallRiskReport small_risk_diagnostics(const ParamVector& theta, double alpha, double beta,
                                              const DomainMeasure& dom) {
  require_1d(theta.shape(), "small_risk_diagnostics");
  if (theta.shape().H != 1) throw DimensionError("small_risk_diagnostics: requires H = 1");
  const Target target = Target::affine(alpha, beta, dom);
  SmallRiskReport rep{};
  rep.risk = risk(theta, target, dom);
  rep.threshold = affine_constant_risk(alpha, dom);
  rep.m = best_constant_risk(target, dom);
  const double w = theta.w(0);
  const double v = theta.v(0);
  rep.slope_product = std::abs(w * v);

  rep.sign = rep.risk < rep.threshold ? (alpha * w * v > 0.0 ? Verdict::ok : Verdict::violated)
                                      : Verdict::not_applicable;
  const double reach = std::max(w * dom.a + theta.b(0), w * dom.b + theta.b(0));
  rep.active = rep.risk < rep.m ? (reach > 0.0 ? Verdict::ok : Verdict::violated) : Verdict::not_applicable;
  if (rep.risk < rep.m) {
    const double len = dom.length();
    rep.slope_lower_bound = (std::sqrt(rep.m) - std::sqrt(rep.risk)) / std::sqrt(dom.rho * len * len * len);
    // Rounding slack: the bound is attained exactly by the best affine fit.
    rep.slope = rep.slope_product >= rep.slope_lower_bound * (1.0 - 1e-12) - 1e-15 ? Verdict::ok
                                                                                   : Verdict::violated;
  } else {
    rep.slope_lower_bound = 0.0;
    rep.slope = Verdict::not_applicable;
  }
  return rep;
}

/// sup_{x in [a,b]} |N(x) - f(x)|; both sides are piecewise affine, so the sup
/// sits on a segment endpoint.
inline double uniform_error(const ParamVector& theta, const Target& target, const DomainMeasure& dom) {
  double worst = 0.0;
  for (const AffineSegment& s : affine_segments(theta, target, dom)) {
    for (double x : {s.lo, s.hi}) {
      const double net = s.net_slope * x + s.net_intercept;
      const double f = s.target_slope * x + s.target_intercept;
      worst = std::max(worst, std::abs(net - f));
    }
  }
  return worst;
}

/// Moments (int x r, int r) over [lo, hi] of the affine r(x) = e1 x + e0.
inline std::array<double, 2> affine_moments(double e1, double e0, double lo, double hi) {
  const double m0 = hi - lo;
  const double m1 = 0.5 * (hi * hi - lo * lo);
  const double m2 = (hi * hi * hi - lo * lo * lo) / 3.0;
  return {e1 * m2 + e0 * m1, e1 * m1 + e0 * m0};
}

/// Inverse of affine_moments: the Gram matrix [[m2, m1], [m1, m0]] is positive
/// definite on a proper interval, so vanishing moments force r = 0.
inline std::array<double, 2> affine_from_moments(double mx, double m1r, double lo, double hi) {
  // Work in the centered variable u = x - mid to keep the system well conditioned.
  const double mid = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  // r = g1 u + g0: int u r = g1 (2h^3/3), int r = g0 (2h).
  const double g0 = m1r / (2.0 * h);
  const double g1 = (mx - mid * m1r) / (2.0 * h * h * h / 3.0);
  return {g1, g0 - g1 * mid};
}

}  // namespace relugf
