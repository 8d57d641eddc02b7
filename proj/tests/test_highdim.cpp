#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "relugf/exact_risk.hpp"
#include "relugf/highdim.hpp"
#include "support/oracles.hpp"

using namespace relugf;

namespace {

const DomainMeasure kUnit(0.0, 1.0, 1.0);

TargetFunction identity_1d() {
  return [](std::span<const double> x) { return x[0]; };
}

}  // namespace

// Known-answer vectors published with Random123.
TEST(Philox, KnownAnswers) {
  using P = Philox4x32;
  EXPECT_EQ(P::generate({0, 0, 0, 0}, {0, 0}), (P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(P::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(P::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, UniformsAndNormalsLookRight) {
  const CounterRng rng(42);
  double sum = 0.0, sum2 = 0.0, nsum = 0.0, nsum2 = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform(k);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
    const double z = rng.normal(k);
    nsum += z;
    nsum2 += z * z;
  }
  EXPECT_NEAR(sum / n, 0.5, 5e-3);
  EXPECT_NEAR(sum2 / n - (sum / n) * (sum / n), 1.0 / 12.0, 5e-3);
  EXPECT_NEAR(nsum / n, 0.0, 1e-2);
  EXPECT_NEAR(nsum2 / n, 1.0, 1e-2);
  EXPECT_EQ(CounterRng(42).uniform(17), rng.uniform(17));
  EXPECT_NE(CounterRng(43).uniform(17), rng.uniform(17));
  EXPECT_NE(CounterRng(42, 1).uniform(17), rng.uniform(17));
}

TEST(McRisk, KnownValues) {
  const MCEstimate<double> fit = mc_risk(ParamVector::single(1, 0, 1, 0), identity_1d(), kUnit, 1000, 1);
  EXPECT_NEAR(fit.mean, 0.0, 1e-28);
  EXPECT_NEAR(fit.std_error, 0.0, 1e-28);
  EXPECT_EQ(fit.n_samples, 1000u);
  EXPECT_EQ(fit.seed, 1u);

  const MCEstimate<double> one = mc_risk(ParamVector::single(1, 0, 1, 1), identity_1d(), kUnit, 1'000'000, 2);
  // Residual is identically 1: the estimate is exact and the spread vanishes.
  EXPECT_NEAR(one.mean, 1.0, 1e-12);
  EXPECT_LE(std::abs(one.mean - 1.0), 4 * one.std_error + 1e-12);

  ParamVector two(NetworkShape(2, 2));
  two.w(0, 0) = 1.0;
  two.w(1, 1) = 1.0;
  two.v(0) = 1.0;
  two.v(1) = 1.0;
  const DomainMeasure box(0.0, 1.0, 1.0);
  const MCEstimate<double> d2 =
      mc_risk(two, [](std::span<const double> x) { return x[0] + x[1]; }, box, 10000, 3);
  EXPECT_NEAR(d2.mean, 0.0, 1e-26);

  EXPECT_THROW(mc_risk(two, identity_1d(), box, 1, 3), std::invalid_argument);
}

TEST(McGradient, KnownValues) {
  const MCEstimate<std::vector<double>> g =
      mc_gradient(ParamVector::single(1, 0, 1, 1), identity_1d(), kUnit, 1'000'000, 5);
  const std::vector<double> want{1, 2, 1, 2};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_GE(g.std_error[k], 0.0);
    EXPECT_LE(std::abs(g.mean[k] - want[k]), 4 * g.std_error[k] + 1e-12) << k;
  }

  ParamVector dead(NetworkShape(2, 2));
  dead.w(0, 0) = 1.0;
  dead.w(0, 1) = 1.0;
  dead.b(0) = -5.0;  // preactivation <= -3 on [0,1]^2
  dead.v(0) = 2.0;
  dead.w(1, 0) = 1.0;
  dead.v(1) = 1.0;
  const MCEstimate<std::vector<double>> h =
      mc_gradient(dead, [](std::span<const double> x) { return x[0] * x[1]; }, DomainMeasure(0, 1), 5000, 6);
  const NetworkShape& s = dead.shape();
  EXPECT_EQ(h.mean[s.w_index(0, 0)], 0.0);
  EXPECT_EQ(h.mean[s.w_index(0, 1)], 0.0);
  EXPECT_EQ(h.mean[s.b_index(0)], 0.0);
  EXPECT_EQ(h.mean[s.v_index(0)], 0.0);
  EXPECT_NE(h.mean[s.v_index(1)], 0.0);
}

TEST(McGradient, CrossValidatesExactRiskInOneDimension) {
  std::mt19937_64 gen(61);
  for (int trial = 0; trial < 30; ++trial) {
    const oracle::Problem pr = oracle::random_problem(gen, 1 + trial % 4);
    const Target f = pr.target;
    const TargetFunction tf = [&f](std::span<const double> x) { return f(x[0]); };
    const RiskReport rep = evaluate(pr.theta, pr.target, pr.dom);
    const MCEstimate<double> r = mc_risk(pr.theta, tf, pr.dom, 50000, 100 + trial);
    EXPECT_LE(std::abs(r.mean - rep.risk), 4 * r.std_error);
    const MCEstimate<std::vector<double>> g = mc_gradient(pr.theta, tf, pr.dom, 50000, 100 + trial);
    for (std::size_t k = 0; k < g.mean.size(); ++k) {
      EXPECT_LE(std::abs(g.mean[k] - rep.gradient[k]), 4 * g.std_error[k] + 1e-12);
    }
  }
}

TEST(MonteCarlo, DeterministicAcrossWorkersAndBlocks) {
  const ParamVector p = ParamVector::from_blocks({0.7, -1.1}, {0.1, 0.6}, {1.3, -0.4}, 0.2);
  const MCEstimate<double> base = mc_risk(p, identity_1d(), kUnit, 100000, 9, {4096, 1});
  for (unsigned w : {1u, 2u, 3u, 8u}) {
    const MCEstimate<double> again = mc_risk(p, identity_1d(), kUnit, 100000, 9, {4096, w});
    EXPECT_EQ(again.mean, base.mean);
    EXPECT_EQ(again.std_error, base.std_error);
    const auto g1 = mc_gradient(p, identity_1d(), kUnit, 30000, 9, {1000, 1});
    const auto gw = mc_gradient(p, identity_1d(), kUnit, 30000, 9, {1000, w});
    EXPECT_EQ(g1.mean, gw.mean);
    EXPECT_EQ(g1.std_error, gw.std_error);
  }
  EXPECT_NE(mc_risk(p, identity_1d(), kUnit, 100000, 10).mean, base.mean);
}

TEST(MonteCarlo, GradientBoundInTwoDimensions) {
  std::mt19937_64 gen(71);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    ParamVector p(NetworkShape(2, 1 + trial % 3));
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = n(gen);
    const DomainMeasure box(-0.5, 1.0, 1.5);
    const double s1 = n(gen), s2 = n(gen);
    const TargetFunction f = [=](std::span<const double> x) { return s1 * x[0] + s2 * x[1]; };
    const auto r = mc_risk(p, f, box, 20000, 500 + trial);
    const auto g = mc_gradient(p, f, box, 20000, 500 + trial);
    double lhs = 0.0;
    for (std::size_t k = 0; k < g.mean.size(); ++k) {
      const double lo = std::max(0.0, std::abs(g.mean[k]) - 5 * g.std_error[k]);
      lhs += lo * lo;
    }
    const double rhs = 4 * (r.mean + 5 * r.std_error) * (1.0 * 3 * squared_norm(p.values()) + 1) * box.mass(2);
    EXPECT_LE(lhs, rhs);
  }
}
