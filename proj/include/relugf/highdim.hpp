#pragma once

// Monte Carlo estimates of the risk and the generalized gradient for any d.
//
// Draws are addressed, not streamed: sample s, coordinate pair k comes from
// Philox4x32-10 at counter (s_lo, s_hi, k, tag) under the 64-bit seed. Samples
// are grouped into fixed blocks whose statistics merge along a fixed binary
// tree, so the estimate is bit-identical for any number of workers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "relugf/model.hpp"

namespace relugf {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Stateless uniform/normal draws addressed by (seed, index, slot).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint32_t tag = 0) : seed_(seed), tag_(tag) {}

  /// Two uniforms in (0, 1) for the given address.
  std::array<double, 2> uniform_pair(std::uint64_t index, std::uint32_t slot) const {
    const Philox4x32::Counter out = Philox4x32::generate(
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), slot, tag_},
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    const std::uint64_t u0 = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    const std::uint64_t u1 = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    return {to_unit(u0), to_unit(u1)};
  }

  double uniform(std::uint64_t index) const { return uniform_pair(index, 0)[0]; }

  /// Standard normal via Box-Muller on the pair at `index`.
  double normal(std::uint64_t index) const {
    const auto [u0, u1] = uniform_pair(index, 0x6e6f726du);
    return std::sqrt(-2.0 * std::log(u0)) * std::cos(2.0 * std::numbers::pi * u1);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static double to_unit(std::uint64_t u) { return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t seed_;
  std::uint32_t tag_;
};

template <class T>
struct MCEstimate {
  T mean{};
  T std_error{};
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

using TargetFunction = std::function<double(std::span<const double>)>;

struct MCOptions {
  std::size_t block_size = 4096;
  unsigned workers = 1;
};

namespace detail {

/// Count/mean/M2 per component, merged with Chan's pairwise update.
struct RunningStats {
  double count = 0.0;
  std::vector<double> mean;
  std::vector<double> m2;

  explicit RunningStats(std::size_t dim = 0) : mean(dim, 0.0), m2(dim, 0.0) {}

  void add(std::span<const double> x) {
    count += 1.0;
    for (std::size_t c = 0; c < mean.size(); ++c) {
      const double delta = x[c] - mean[c];
      mean[c] += delta / count;
      m2[c] += delta * (x[c] - mean[c]);
    }
  }

  static RunningStats merge(const RunningStats& a, const RunningStats& b) {
    if (a.count == 0.0) return b;
    if (b.count == 0.0) return a;
    RunningStats out(a.mean.size());
    out.count = a.count + b.count;
    for (std::size_t c = 0; c < a.mean.size(); ++c) {
      const double delta = b.mean[c] - a.mean[c];
      out.mean[c] = a.mean[c] + delta * (b.count / out.count);
      out.m2[c] = a.m2[c] + b.m2[c] + delta * delta * (a.count * b.count / out.count);
    }
    return out;
  }
};

inline RunningStats tree_reduce(std::vector<RunningStats> blocks) {
  while (blocks.size() > 1) {
    std::vector<RunningStats> next;
    next.reserve((blocks.size() + 1) / 2);
    for (std::size_t k = 0; k + 1 < blocks.size(); k += 2) next.push_back(RunningStats::merge(blocks[k], blocks[k + 1]));
    if (blocks.size() % 2 == 1) next.push_back(std::move(blocks.back()));
    blocks = std::move(next);
  }
  return std::move(blocks.front());
}

/// integrand(x, out) for n uniform points on [a, b]^d.
template <class F>
RunningStats sample_blocks(std::size_t d, std::size_t dim_out, const DomainMeasure& dom, std::size_t n,
                           std::uint64_t seed, const MCOptions& opt, F integrand) {
  if (n < 2) throw std::invalid_argument("Monte Carlo: need at least two samples");
  if (opt.block_size == 0) throw std::invalid_argument("Monte Carlo: block_size must be positive");
  const std::size_t n_blocks = (n + opt.block_size - 1) / opt.block_size;
  std::vector<RunningStats> blocks(n_blocks, RunningStats(dim_out));
  const CounterRng rng(seed, 0x6d63u);

  auto run = [&](unsigned worker, unsigned n_workers) {
    std::vector<double> x(d);
    std::vector<double> out(dim_out);
    for (std::size_t blk = worker; blk < n_blocks; blk += n_workers) {
      RunningStats st(dim_out);
      const std::size_t end = std::min(n, (blk + 1) * opt.block_size);
      for (std::size_t s = blk * opt.block_size; s < end; ++s) {
        for (std::size_t j = 0; j < d; j += 2) {
          const auto u = rng.uniform_pair(s, static_cast<std::uint32_t>(j / 2));
          x[j] = dom.a + dom.length() * u[0];
          if (j + 1 < d) x[j + 1] = dom.a + dom.length() * u[1];
        }
        integrand(std::span<const double>(x), std::span<double>(out));
        st.add(out);
      }
      blocks[blk] = std::move(st);
    }
  };

  const unsigned workers = std::max(1u, opt.workers);
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  }
  return tree_reduce(std::move(blocks));
}

inline void scaled_moments(const RunningStats& st, double mass, std::size_t c, double& mean, double& se) {
  mean = mass * st.mean[c];
  se = mass * std::sqrt(st.m2[c] / (st.count - 1.0)) / std::sqrt(st.count);
}

}  // namespace detail

/// rho (b-a)^d * sample mean of (N(X) - f(X))^2 over uniform X.
inline MCEstimate<double> mc_risk(const ParamVector& theta, const TargetFunction& f, const DomainMeasure& dom,
                                  std::size_t n, std::uint64_t seed, const MCOptions& opt = {}) {
  const std::size_t d = theta.shape().d;
  const detail::RunningStats st = detail::sample_blocks(d, 1, dom, n, seed, opt, [&](auto x, auto out) {
    const double e = realization(theta, x) - f(x);
    out[0] = e * e;
  });
  MCEstimate<double> est;
  est.n_samples = n;
  est.seed = seed;
  detail::scaled_moments(st, dom.mass(d), 0, est.mean, est.std_error);
  return est;
}

/// Per-component Monte Carlo means of the generalized-gradient integrands,
/// with the active-region indicator taken as a strict sign test.
inline MCEstimate<std::vector<double>> mc_gradient(const ParamVector& theta, const TargetFunction& f,
                                                   const DomainMeasure& dom, std::size_t n,
                                                   std::uint64_t seed, const MCOptions& opt = {}) {
  const NetworkShape& shape = theta.shape();
  const std::size_t d = shape.d;
  const std::size_t H = shape.H;
  const detail::RunningStats st =
      detail::sample_blocks(d, shape.dim(), dom, n, seed, opt, [&](std::span<const double> x, std::span<double> out) {
        const double res = realization(theta, x) - f(x);
        for (std::size_t i = 0; i < H; ++i) {
          const double z = preactivation(theta, i, x);
          const double on = z > 0.0 ? 2.0 * theta.v(i) * res : 0.0;
          for (std::size_t j = 0; j < d; ++j) out[shape.w_index(i, j)] = on * x[j];
          out[shape.b_index(i)] = on;
          out[shape.v_index(i)] = 2.0 * std::max(z, 0.0) * res;
        }
        out[shape.c_index()] = 2.0 * res;
      });
  MCEstimate<std::vector<double>> est;
  est.n_samples = n;
  est.seed = seed;
  est.mean.resize(shape.dim());
  est.std_error.resize(shape.dim());
  const double mass = dom.mass(d);
  for (std::size_t c = 0; c < shape.dim(); ++c) {
    detail::scaled_moments(st, mass, c, est.mean[c], est.std_error[c]);
  }
  return est;
}

}  // namespace relugf
