#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "relugf/errors.hpp"
#include "relugf/exact_risk.hpp"
#include "support/oracles.hpp"

using namespace relugf;

namespace {

const DomainMeasure kUnit(0.0, 1.0, 1.0);
const Target kIdentity = Target::affine(1.0, 0.0, kUnit);

void expect_vec_near(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], tol) << "component " << k;
}

}  // namespace

TEST(Risk, KnownValues) {
  EXPECT_EQ(risk(ParamVector::single(1, 0, 1, 0), kIdentity, kUnit), 0.0);
  EXPECT_DOUBLE_EQ(risk(ParamVector::single(1, 0, 1, 1), kIdentity, kUnit), 1.0);
  EXPECT_DOUBLE_EQ(risk(ParamVector::single(0, 0, 0, 0.5), kIdentity, kUnit), 1.0 / 12.0);
}

TEST(Risk, MatchesQuadratureOracleOnPiecewiseTargets) {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> n;
  const DomainMeasure dom(-0.5, 1.5, 0.7);
  const Target hat = Target::piecewise({{-0.5, 0.2, 2.0, 1.0}, {0.2, 0.9, -1.0, 1.6}, {0.9, 1.5, 0.5, 0.25}});
  for (int trial = 0; trial < 100; ++trial) {
    ParamVector p(NetworkShape(1, 1 + trial % 4));
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = n(gen);
    EXPECT_TRUE(close(risk(p, hat, dom), oracle::risk(p, hat, dom), 1e-10));
    const std::vector<double> g = gradient(p, hat, dom);
    const std::vector<double> q = oracle::gradient(p, hat, dom);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_TRUE(close(g[k], q[k], 1e-9)) << g[k] << " vs " << q[k];
  }
}

TEST(Gradient, KnownValues) {
  expect_vec_near(gradient(ParamVector::single(1, 0, 1, 0), kIdentity, kUnit), {0, 0, 0, 0}, 0.0);
  expect_vec_near(gradient(ParamVector::single(1, 0, 1, 1), kIdentity, kUnit), {1, 2, 1, 2}, 1e-14);
  for (double xi : {-1.0, 0.0, 0.5, 3.0}) {
    const std::vector<double> g = gradient(ParamVector::single(0, -1, 5, xi), Target::affine(2.0, -1.0, kUnit), kUnit);
    EXPECT_EQ(g[0], 0.0);
    EXPECT_EQ(g[1], 0.0);
    EXPECT_EQ(g[2], 0.0);
  }
}

TEST(Gradient, RejectsHigherDimensions) {
  EXPECT_THROW(risk(ParamVector(NetworkShape(2, 1)), kIdentity, kUnit), DimensionError);
  EXPECT_THROW(gradient(ParamVector(NetworkShape(2, 1)), kIdentity, kUnit), DimensionError);
}

TEST(Evaluate, ReportIsConsistent) {
  const ParamVector p = ParamVector::from_blocks({0.7, -1.3}, {-0.2, 0.9}, {1.1, 0.4}, 0.3);
  const RiskReport rep = evaluate(p, kIdentity, kUnit);
  EXPECT_DOUBLE_EQ(rep.risk, risk(p, kIdentity, kUnit));
  EXPECT_DOUBLE_EQ(rep.grad_norm, norm(rep.gradient));
  EXPECT_GE(rep.risk, 0.0);
}

TEST(FiniteDifferences, KnownValues) {
  expect_vec_near(finite_difference_gradient(ParamVector::single(1, 0, 1, 1), kIdentity, kUnit, 1e-6),
                  {1, 2, 1, 2}, 1e-5);
  expect_vec_near(finite_difference_gradient(ParamVector::single(1, 0, 1, 0), kIdentity, kUnit, 1e-6),
                  {0, 0, 0, 0}, 1e-6);
}

TEST(FiniteDifferences, DegeneratePointIsExcludedNotFailed) {
  // w = b = 0 with v != 0 and positive risk violates the differentiability condition.
  const ParamVector p = ParamVector::single(0, 0, 1, 1);
  ASSERT_GT(risk(p, kIdentity, kUnit), 0.0);
  EXPECT_FALSE(satisfies_differentiability_condition(p, risk(p, kIdentity, kUnit)));
  EXPECT_EQ(compare_with_finite_differences(p, kIdentity, kUnit).verdict, FdVerdict::excluded);
  // A kink sitting on the boundary (b = 0) is still a differentiable point.
  const ParamVector q = ParamVector::single(1, 0, 1, 1);
  EXPECT_EQ(compare_with_finite_differences(q, kIdentity, kUnit).verdict, FdVerdict::agree);
}

TEST(FiniteDifferences, AgreeAtDifferentiablePoints) {
  std::mt19937_64 gen(99);
  std::size_t checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const oracle::Problem pr = oracle::random_problem(gen, 1 + trial % 4);
    const FdComparison cmp = compare_with_finite_differences(pr.theta, pr.target, pr.dom);
    if (cmp.verdict == FdVerdict::excluded) continue;
    ++checked;
    EXPECT_EQ(cmp.verdict, FdVerdict::agree) << cmp.max_deviation << " > " << cmp.tolerance;
  }
  EXPECT_GT(checked, 150u);
}

TEST(GradientBound, KnownValues) {
  const GradientBoundCheck fit = gradient_norm_bound_check(ParamVector::single(1, 0, 1, 0), kIdentity, kUnit);
  EXPECT_EQ(fit.lhs, 0.0);
  EXPECT_EQ(fit.rhs, 0.0);
  EXPECT_TRUE(fit.ok);
  const GradientBoundCheck off = gradient_norm_bound_check(ParamVector::single(1, 0, 1, 1), kIdentity, kUnit);
  EXPECT_NEAR(off.lhs, 10.0, 1e-13);
  EXPECT_NEAR(off.rhs, 28.0, 1e-13);
  EXPECT_TRUE(off.ok);
}

TEST(GradientBound, HoldsForRandomNormalDraws) {
  std::mt19937_64 gen(1234);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 1000; ++trial) {
    ParamVector p(NetworkShape(1, 1 + trial % 3));
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = n(gen);
    EXPECT_TRUE(gradient_norm_bound_check(p, kIdentity, kUnit).ok);
  }
}

TEST(Scaling, LinearInDensity) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const oracle::Problem pr = oracle::random_problem(gen, 3);
    const DomainMeasure twice(pr.dom.a, pr.dom.b, 2.0 * pr.dom.rho);
    const RiskReport one = evaluate(pr.theta, pr.target, pr.dom);
    const RiskReport two = evaluate(pr.theta, pr.target, twice);
    EXPECT_TRUE(close(two.risk, 2.0 * one.risk, 1e-14));
    for (std::size_t k = 0; k < one.gradient.size(); ++k) {
      EXPECT_TRUE(close(two.gradient[k], 2.0 * one.gradient[k], 1e-14));
    }
  }
}

TEST(LowerSemicontinuity, NormDoesNotDropAtDegeneratePoints) {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    oracle::Problem pr = oracle::random_problem(gen, 2);
    pr.theta.w(0) = 0.0;
    pr.theta.b(0) = 0.0;
    const double g0 = evaluate(pr.theta, pr.target, pr.dom).grad_norm;
    std::vector<double> dir(pr.theta.size());
    for (double& e : dir) e = n(gen);
    double tail = std::numeric_limits<double>::infinity();
    for (int m = 40; m <= 60; ++m) {
      ParamVector q = pr.theta;
      for (std::size_t k = 0; k < q.size(); ++k) q[k] += std::ldexp(dir[k], -m);
      tail = std::min(tail, evaluate(q, pr.target, pr.dom).grad_norm);
    }
    EXPECT_GE(tail, g0 - 1e-8);
  }
}

TEST(ConstantFit, MeanAndRisk) {
  const Target f = Target::affine(2.0, 3.0, kUnit);
  EXPECT_DOUBLE_EQ(target_mean(f), 4.0);
  EXPECT_NEAR(constant_fit_risk(f, kUnit, 4.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(constant_fit_risk(f, kUnit, 5.0), 1.0 / 3.0 + 1.0, 1e-14);
}
