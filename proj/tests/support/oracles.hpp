#pragma once

// Independent reference implementations used by the tests. Nothing here calls
// the closed-form integration in the library: integrals go through Boost's
// Gauss-Kronrod rule on panels cut at kinks found from first principles, and
// flows are stepped with plain explicit Euler.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "relugf/model.hpp"

namespace oracle {

using relugf::DomainMeasure;
using relugf::NetworkShape;
using relugf::ParamVector;
using relugf::Target;

/// N(x) evaluated from scratch (no library realization()).
inline double net(const ParamVector& th, double x) {
  const std::size_t H = th.shape().H;
  double y = th[H * 3];
  for (std::size_t i = 0; i < H; ++i) y += th[2 * H + i] * std::max(th[i] * x + th[H + i], 0.0);
  return y;
}

inline std::vector<double> panels(const ParamVector& th, const Target& f, const DomainMeasure& dom) {
  const std::size_t H = th.shape().H;
  std::vector<double> cuts{dom.a, dom.b};
  for (double x : f.breaks()) cuts.push_back(x);
  for (std::size_t i = 0; i < H; ++i) {
    if (th[i] != 0.0) {
      const double x = -th[H + i] / th[i];
      if (x > dom.a && x < dom.b) cuts.push_back(x);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

// Each panel integrand is a low-degree polynomial, which the 61-point rule
// integrates exactly; a tighter tolerance only makes Boost recurse on roundoff.
template <class F>
double integrate(F g, const std::vector<double>& cuts) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, cuts[k], cuts[k + 1], 4, 1e-12);
  }
  return total;
}

inline double risk(const ParamVector& th, const Target& f, const DomainMeasure& dom) {
  return dom.rho * integrate(
                       [&](double x) {
                         const double e = net(th, x) - f(x);
                         return e * e;
                       },
                       panels(th, f, dom));
}

/// Quadrature of the generalized-gradient integrands, component by component.
inline std::vector<double> gradient(const ParamVector& th, const Target& f, const DomainMeasure& dom) {
  const std::size_t H = th.shape().H;
  const auto cuts = panels(th, f, dom);
  auto res = [&](double x) { return net(th, x) - f(x); };
  std::vector<double> g(th.size());
  for (std::size_t i = 0; i < H; ++i) {
    const double w = th[i], b = th[H + i], v = th[2 * H + i];
    g[i] = 2 * dom.rho * v * integrate([&](double x) { return w * x + b > 0 ? x * res(x) : 0.0; }, cuts);
    g[H + i] = 2 * dom.rho * v * integrate([&](double x) { return w * x + b > 0 ? res(x) : 0.0; }, cuts);
    g[2 * H + i] = 2 * dom.rho * integrate([&](double x) { return std::max(w * x + b, 0.0) * res(x); }, cuts);
  }
  g[3 * H] = 2 * dom.rho * integrate(res, cuts);
  return g;
}

inline double sup_error(const ParamVector& th, const Target& f, const DomainMeasure& dom) {
  double worst = 0.0;
  for (double x : panels(th, f, dom)) worst = std::max(worst, std::abs(net(th, x) - f(x)));
  return worst;
}

/// Explicit Euler with the quadrature gradient is far too slow for long
/// horizons, so the stepping oracle takes the gradient as a callback.
template <class Grad>
ParamVector euler(ParamVector th, Grad grad, double t_end, double dt) {
  const auto steps = static_cast<long long>(std::llround(t_end / dt));
  for (long long s = 0; s < steps; ++s) {
    const std::vector<double> g = grad(th);
    for (std::size_t k = 0; k < th.size(); ++k) th[k] -= dt * g[k];
  }
  return th;
}

struct Problem {
  ParamVector theta;
  Target target;
  DomainMeasure dom;
};

/// Random d = 1 problem from a Mersenne twister (independent of the library RNG).
inline Problem random_problem(std::mt19937_64& gen, std::size_t H) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  const double a = -1.0 + 1.5 * u(gen);
  const DomainMeasure dom(a, a + 0.5 + 1.5 * u(gen), 0.5 + 1.5 * u(gen));
  const Target f = Target::affine(-2.0 + 4.0 * u(gen), -1.0 + 2.0 * u(gen), dom);
  ParamVector th(NetworkShape(1, H));
  for (std::size_t k = 0; k < th.size(); ++k) th[k] = n(gen);
  return {th, f, dom};
}

}  // namespace oracle
