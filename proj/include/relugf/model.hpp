#pragma once

// Shallow ReLU network x -> c + sum_i v_i max(b_i + <w_i, x>, 0) over a box
// [a, b]^d with uniform density rho.
//
// Flat parameter layout (0-based here, 1-based in the usual write-up):
//   [ w_{1,1..d}, ..., w_{H,1..d} | b_1..b_H | v_1..v_H | c ]

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "relugf/errors.hpp"

namespace relugf {

/// Kinks closer than this (absolute) are merged into a single breakpoint.
inline constexpr double kKinkMergeTol = 1e-14;

/// |x - y| <= atol + rtol * max(|x|, |y|).
inline bool close(double x, double y, double rtol, double atol = 1e-12) {
  return std::abs(x - y) <= atol + rtol * std::max(std::abs(x), std::abs(y));
}

inline double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return s;
}

inline double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

struct NetworkShape {
  std::size_t d = 1;
  std::size_t H = 1;

  NetworkShape() = default;
  NetworkShape(std::size_t d_, std::size_t H_) : d(d_), H(H_) {
    if (d == 0 || H == 0) throw DimensionError("NetworkShape: d and H must be positive");
  }

  std::size_t dim() const { return d * H + 2 * H + 1; }

  std::size_t w_index(std::size_t i, std::size_t j) const { return i * d + j; }
  std::size_t b_index(std::size_t i) const { return H * d + i; }
  std::size_t v_index(std::size_t i) const { return H * (d + 1) + i; }
  std::size_t c_index() const { return dim() - 1; }

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

class ParamVector {
 public:
  ParamVector() : ParamVector(NetworkShape{}) {}
  explicit ParamVector(NetworkShape shape) : shape_(shape), values_(shape.dim(), 0.0) {}
  ParamVector(NetworkShape shape, std::vector<double> values)
      : shape_(shape), values_(std::move(values)) {
    if (values_.size() != shape_.dim()) {
      throw DimensionError("ParamVector: expected " + std::to_string(shape_.dim()) +
                           " values, got " + std::to_string(values_.size()));
    }
  }

  /// Single-neuron, one-dimensional network (w, b, v, c).
  static ParamVector single(double w, double b, double v, double c) {
    return ParamVector(NetworkShape(1, 1), {w, b, v, c});
  }

  /// One-dimensional network from per-neuron blocks.
  static ParamVector from_blocks(std::span<const double> w, std::span<const double> b,
                                 std::span<const double> v, double c) {
    if (w.size() != b.size() || w.size() != v.size() || w.empty()) {
      throw DimensionError("ParamVector::from_blocks: block sizes disagree");
    }
    ParamVector p(NetworkShape(1, w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
      p.w(i) = w[i];
      p.b(i) = b[i];
      p.v(i) = v[i];
    }
    p.c() = c;
    return p;
  }
  static ParamVector from_blocks(std::initializer_list<double> w, std::initializer_list<double> b,
                                 std::initializer_list<double> v, double c) {
    return from_blocks(std::span<const double>(w.begin(), w.size()),
                       std::span<const double>(b.begin(), b.size()),
                       std::span<const double>(v.begin(), v.size()), c);
  }

  const NetworkShape& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }

  double& w(std::size_t i, std::size_t j = 0) { return values_[shape_.w_index(i, j)]; }
  double w(std::size_t i, std::size_t j = 0) const { return values_[shape_.w_index(i, j)]; }
  double& b(std::size_t i) { return values_[shape_.b_index(i)]; }
  double b(std::size_t i) const { return values_[shape_.b_index(i)]; }
  double& v(std::size_t i) { return values_[shape_.v_index(i)]; }
  double v(std::size_t i) const { return values_[shape_.v_index(i)]; }
  double& c() { return values_[shape_.c_index()]; }
  double c() const { return values_[shape_.c_index()]; }

  std::span<const double> w_row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * shape_.d, shape_.d);
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  bool is_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double e) { return std::isfinite(e); });
  }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  NetworkShape shape_;
  std::vector<double> values_;
};

/// Uniform density rho against Lebesgue measure on [a, b]^d.
struct DomainMeasure {
  double a = 0.0;
  double b = 1.0;
  double rho = 1.0;

  DomainMeasure() = default;
  DomainMeasure(double a_, double b_, double rho_ = 1.0) : a(a_), b(b_), rho(rho_) {
    if (!(b > a) || !(rho > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(rho)) {
      throw std::invalid_argument("DomainMeasure: requires finite a < b and rho > 0");
    }
  }

  double length() const { return b - a; }
  double mass(std::size_t d = 1) const { return rho * std::pow(b - a, static_cast<double>(d)); }
};

/// Continuous piecewise-affine function on [lo, hi].
class Target {
 public:
  struct Piece {
    double lo;
    double hi;
    double slope;
    double intercept;
    double operator()(double x) const { return slope * x + intercept; }
  };

  static Target affine(double alpha, double beta, const DomainMeasure& dom) {
    Target t;
    t.pieces_.push_back({dom.a, dom.b, alpha, beta});
    return t;
  }

  /// Pieces must tile their span in order and agree at shared endpoints.
  static Target piecewise(std::vector<Piece> pieces) {
    if (pieces.empty()) throw std::invalid_argument("Target: no pieces");
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const Piece& p = pieces[k];
      if (!(p.hi > p.lo)) throw std::invalid_argument("Target: empty or reversed piece");
      if (k > 0) {
        const Piece& q = pieces[k - 1];
        if (q.hi != p.lo) throw std::invalid_argument("Target: pieces do not tile the domain");
        if (!close(q(p.lo), p(p.lo), 1e-12)) {
          throw std::invalid_argument("Target: discontinuity at x = " + std::to_string(p.lo));
        }
      }
    }
    Target t;
    t.pieces_ = std::move(pieces);
    return t;
  }

  double lo() const { return pieces_.front().lo; }
  double hi() const { return pieces_.back().hi; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  bool is_affine() const { return pieces_.size() == 1; }

  /// Slope of the affine case.
  double alpha() const { return pieces_.front().slope; }
  double beta() const { return pieces_.front().intercept; }

  const Piece& piece_at(double x) const {
    for (const Piece& p : pieces_) {
      if (x <= p.hi) return p;
    }
    return pieces_.back();
  }

  double operator()(double x) const { return piece_at(x)(x); }

  /// Interior piece boundaries.
  std::vector<double> breaks() const {
    std::vector<double> out;
    for (std::size_t k = 1; k < pieces_.size(); ++k) out.push_back(pieces_[k].lo);
    return out;
  }

  void require_matches(const DomainMeasure& dom) const {
    if (!close(lo(), dom.a, 1e-12) || !close(hi(), dom.b, 1e-12)) {
      throw std::invalid_argument("Target: span does not match the domain");
    }
  }

 private:
  std::vector<Piece> pieces_;
};

/// Interval in R with explicit open/closed ends; `empty` overrides the rest.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;
  bool empty = true;

  static Interval none() { return {}; }
  static Interval make(double lo, double hi, bool lo_open, bool hi_open) {
    if (hi < lo || (hi == lo && (lo_open || hi_open))) return none();
    return {lo, hi, lo_open, hi_open, false};
  }

  double length() const { return empty ? 0.0 : hi - lo; }

  bool contains(double x) const {
    if (empty) return false;
    const bool left = lo_open ? x > lo : x >= lo;
    const bool right = hi_open ? x < hi : x <= hi;
    return left && right;
  }
};

struct Breakpoints {
  std::vector<double> kinks;
  /// Active neurons (0-based) on each of the kinks.size() + 1 segments.
  std::vector<std::vector<std::size_t>> pattern;
};

inline void require_1d(const NetworkShape& s, const char* what) {
  if (s.d != 1) throw DimensionError(std::string(what) + ": only d = 1 is supported");
}

inline void require_neuron(const NetworkShape& s, std::size_t i) {
  if (i >= s.H) {
    throw IndexError("neuron index " + std::to_string(i) + " outside [0, " + std::to_string(s.H) + ")");
  }
}

inline double preactivation(const ParamVector& theta, std::size_t i, std::span<const double> x) {
  double z = theta.b(i);
  for (std::size_t j = 0; j < theta.shape().d; ++j) z += theta.w(i, j) * x[j];
  return z;
}

inline double preactivation(const ParamVector& theta, std::size_t i, double x) {
  return theta.w(i) * x + theta.b(i);
}

inline double realization(const ParamVector& theta, std::span<const double> x) {
  if (x.size() != theta.shape().d) throw DimensionError("realization: input has wrong dimension");
  double out = theta.c();
  for (std::size_t i = 0; i < theta.shape().H; ++i) {
    out += theta.v(i) * std::max(preactivation(theta, i, x), 0.0);
  }
  return out;
}

inline double realization(const ParamVector& theta, double x) {
  return realization(theta, std::span<const double>(&x, 1));
}

/// Interior kink of neuron i, if any: -b_i/w_i strictly inside (a, b).
inline bool interior_kink(const ParamVector& theta, std::size_t i, const DomainMeasure& dom, double& at) {
  const double w = theta.w(i);
  if (w == 0.0) return false;
  at = -theta.b(i) / w;
  return at > dom.a && at < dom.b;
}

namespace detail {

inline void sort_and_merge(std::vector<double>& xs, double tol) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  }
  xs = std::move(out);
}

inline std::vector<std::size_t> active_at(const ParamVector& theta, double x) {
  std::vector<std::size_t> act;
  for (std::size_t i = 0; i < theta.shape().H; ++i) {
    if (preactivation(theta, i, x) > 0.0) act.push_back(i);
  }
  return act;
}

}  // namespace detail

inline Breakpoints breakpoints(const ParamVector& theta, const DomainMeasure& dom) {
  require_1d(theta.shape(), "breakpoints");
  Breakpoints bp;
  for (std::size_t i = 0; i < theta.shape().H; ++i) {
    double k;
    if (interior_kink(theta, i, dom, k)) bp.kinks.push_back(k);
  }
  detail::sort_and_merge(bp.kinks, kKinkMergeTol);
  double lo = dom.a;
  for (std::size_t s = 0; s <= bp.kinks.size(); ++s) {
    const double hi = s < bp.kinks.size() ? bp.kinks[s] : dom.b;
    bp.pattern.push_back(detail::active_at(theta, 0.5 * (lo + hi)));
    lo = hi;
  }
  return bp;
}

/// Segment of [a, b] on which both the realization and the target are affine.
struct AffineSegment {
  double lo;
  double hi;
  /// active[i] != 0 iff neuron i is active on the segment interior.
  std::vector<char> active;
  double net_slope;
  double net_intercept;
  double target_slope;
  double target_intercept;
};

/// Common refinement of the network kinks and the target piece boundaries.
inline std::vector<AffineSegment> affine_segments(const ParamVector& theta, const Target& target,
                                                  const DomainMeasure& dom) {
  require_1d(theta.shape(), "affine_segments");
  target.require_matches(dom);
  const std::size_t H = theta.shape().H;
  std::vector<double> cuts;
  for (std::size_t i = 0; i < H; ++i) {
    double k;
    if (interior_kink(theta, i, dom, k)) cuts.push_back(k);
  }
  for (double x : target.breaks()) cuts.push_back(x);
  detail::sort_and_merge(cuts, kKinkMergeTol);

  std::vector<AffineSegment> segs;
  segs.reserve(cuts.size() + 1);
  double lo = dom.a;
  for (std::size_t s = 0; s <= cuts.size(); ++s) {
    const double hi = s < cuts.size() ? cuts[s] : dom.b;
    const double mid = 0.5 * (lo + hi);
    AffineSegment seg{lo, hi, std::vector<char>(H, 0), 0.0, theta.c(), 0.0, 0.0};
    for (std::size_t i = 0; i < H; ++i) {
      if (preactivation(theta, i, mid) > 0.0) {
        seg.active[i] = 1;
        seg.net_slope += theta.v(i) * theta.w(i);
        seg.net_intercept += theta.v(i) * theta.b(i);
      }
    }
    const Target::Piece& p = target.piece_at(mid);
    seg.target_slope = p.slope;
    seg.target_intercept = p.intercept;
    segs.push_back(std::move(seg));
    lo = hi;
  }
  return segs;
}

/// I_i = {x in [a, b] : w_i x + b_i > 0} for d = 1.
inline Interval active_interval(const ParamVector& theta, std::size_t i, const DomainMeasure& dom) {
  require_1d(theta.shape(), "active_interval");
  require_neuron(theta.shape(), i);
  const double w = theta.w(i);
  const double b = theta.b(i);
  if (w == 0.0) {
    // Constant preactivation: all or nothing.
    return b > 0.0 ? Interval::make(dom.a, dom.b, false, false) : Interval::none();
  }
  const double k = -b / w;
  if (w > 0.0) {
    if (k < dom.a) return Interval::make(dom.a, dom.b, false, false);
    if (k >= dom.b) return Interval::none();
    return Interval::make(k, dom.b, true, false);
  }
  if (k > dom.b) return Interval::make(dom.a, dom.b, false, false);
  if (k <= dom.a) return Interval::none();
  return Interval::make(dom.a, k, false, true);
}

/// Lebesgue length of the symmetric difference.
inline double symdiff_length(const Interval& I, const Interval& J) {
  double overlap = 0.0;
  if (!I.empty && !J.empty) overlap = std::max(0.0, std::min(I.hi, J.hi) - std::max(I.lo, J.lo));
  return I.length() + J.length() - 2.0 * overlap;
}

/// W_i = |w_i|^2 + b_i^2 - v_i^2, conserved along gradient flow.
inline double balancedness(const ParamVector& theta, std::size_t i) {
  require_neuron(theta.shape(), i);
  return squared_norm(theta.w_row(i)) + theta.b(i) * theta.b(i) - theta.v(i) * theta.v(i);
}

/// V_xi = |theta|^2 + (c - 2 xi)^2.
inline double lyapunov(const ParamVector& theta, double xi) {
  const double e = theta.c() - 2.0 * xi;
  return squared_norm(theta.values()) + e * e;
}

}  // namespace relugf
