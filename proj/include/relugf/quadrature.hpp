#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace relugf {

/// Nodes and weights of the N-point Gauss-Legendre rule on [-1, 1].
template <std::size_t N>
struct GaussLegendreRule {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendreRule() {
    for (std::size_t k = 0; k < (N + 1) / 2; ++k) {
      // Tricomi initial guess, then Newton on P_N.
      double x = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.75) / (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t n = 2; n <= N; ++n) {
          const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / static_cast<double>(n);
          p0 = p1;
          p1 = p2;
        }
        dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes[k] = -x;
      weights[k] = w;
      nodes[N - 1 - k] = x;
      weights[N - 1 - k] = w;
    }
  }

  static const GaussLegendreRule& get() {
    static const GaussLegendreRule rule;
    return rule;
  }
};

struct QuadratureOptions {
  /// Accept a panel once |Q32 - Q16| <= abs_tol (max over components).
  double abs_tol = 1e-13;
  double rel_tol = 1e-15;
  int max_depth = 48;
};

namespace detail {

template <std::size_t N, class F>
void apply_rule(F& f, double lo, double hi, std::span<double> out, std::span<double> scratch) {
  const auto& rule = GaussLegendreRule<N>::get();
  const double m = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  for (double& e : out) e = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    f(m + h * rule.nodes[k], scratch);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += rule.weights[k] * scratch[c];
  }
  for (double& e : out) e *= h;
}

template <class F>
void adaptive_panel(F& f, double lo, double hi, const QuadratureOptions& opt, int depth,
                    std::span<double> acc, std::vector<double>& buf) {
  const std::size_t n = acc.size();
  std::span<double> q16(buf.data(), n);
  std::span<double> q32(buf.data() + n, n);
  std::span<double> scratch(buf.data() + 2 * n, n);
  apply_rule<16>(f, lo, hi, q16, scratch);
  apply_rule<32>(f, lo, hi, q32, scratch);
  double err = 0.0;
  double mag = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    err = std::max(err, std::abs(q32[c] - q16[c]));
    mag = std::max(mag, std::abs(q32[c]));
  }
  if (err <= std::max(opt.abs_tol, opt.rel_tol * mag) || depth >= opt.max_depth) {
    for (std::size_t c = 0; c < n; ++c) acc[c] += q32[c];
    return;
  }
  const double mid = 0.5 * (lo + hi);
  adaptive_panel(f, lo, mid, opt, depth + 1, acc, buf);
  adaptive_panel(f, mid, hi, opt, depth + 1, acc, buf);
}

}  // namespace detail

/// Adaptive Gauss-Legendre quadrature of a vector-valued integrand
/// f(x, out) over [lo, hi], bisecting panels until the 16- and 32-point rules
/// agree. Results accumulate into `acc` (not cleared).
template <class F>
void integrate_adaptive(F&& f, double lo, double hi, std::span<double> acc,
                        const QuadratureOptions& opt = {}) {
  if (!(hi >= lo)) throw std::invalid_argument("integrate_adaptive: reversed interval");
  if (hi == lo) return;
  std::vector<double> buf(3 * acc.size());
  detail::adaptive_panel(f, lo, hi, opt, 0, acc, buf);
}

/// Scalar convenience over a list of breakpoints (each consecutive pair is a panel).
template <class F>
double integrate_adaptive(F&& f, std::span<const double> cuts, const QuadratureOptions& opt = {}) {
  double total = 0.0;
  auto vf = [&f](double x, std::span<double> out) { out[0] = f(x); };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    integrate_adaptive(vf, cuts[k], cuts[k + 1], std::span<double>(&total, 1), opt);
  }
  return total;
}

}  // namespace relugf
