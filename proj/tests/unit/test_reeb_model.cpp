#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "reebflow/error.hpp"
#include "reebflow/reeb_model.hpp"

using namespace reebflow;

namespace {

const BetaProfile kProfile{};

void expect_point(const QuadrantPoint& p, double x, double y, double tol = 1e-12) {
  EXPECT_NEAR(p.x(), x, tol);
  EXPECT_NEAR(p.y(), y, tol);
}

}  // namespace

TEST(QuadrantPoint, ConstructionAndAccessors) {
  const auto p = QuadrantPoint::from_xy(2.0, 0.25);
  EXPECT_DOUBLE_EQ(p.x(), 2.0);
  EXPECT_DOUBLE_EQ(p.y(), 0.25);
  EXPECT_NEAR(p.leaf_log(), std::log(0.5), 1e-15);
  EXPECT_NEAR(p.log_ratio(), std::log(0.125), 1e-15);
  EXPECT_THROW(QuadrantPoint::from_xy(0.0, 1.0), DomainError);
  EXPECT_THROW(QuadrantPoint::from_xy(1.0, -1.0), DomainError);
  EXPECT_THROW(QuadrantPoint::from_logs(std::nan(""), 0.0), DomainError);
  EXPECT_THROW(BoundaryPoint::on_delta(0.0), DomainError);
}

TEST(Beta, Examples) {
  EXPECT_EQ(beta(kProfile, 0.6), 1.0);
  EXPECT_EQ(beta(kProfile, 1.2), 1.0);
  EXPECT_NEAR(beta(kProfile, 0.875), oracle::kBeta0875, 1e-15);
  EXPECT_NEAR(beta(kProfile, 0.758), oracle::kBeta0758, 1e-13);
  EXPECT_THROW(beta(kProfile, 0.49), DomainError);
  EXPECT_THROW(beta(kProfile, 2.01), DomainError);
}

TEST(Beta, ProfilePropertiesOnFineGrid) {
  const int n = 100000;
  double prev_r1 = -INFINITY, prev_r2 = -INFINITY;
  for (int i = 0; i <= n; ++i) {
    const double th = 0.5 + 1.5 * i / n;
    const double b = kProfile(th);
    const bool flat = (th <= 0.75) || (th >= 1.0 && th <= 1.5) || th == 2.0;
    if (flat) ASSERT_EQ(b, 1.0) << th;
    else ASSERT_GT(b, 1.0) << th;
    if (th <= 1.0) ASSERT_EQ(b, kProfile(2.0 * th)) << th;
    const double r1 = th / b, r2 = th / (b * b);
    ASSERT_GT(r1, prev_r1) << th;
    ASSERT_GT(r2, prev_r2) << th;
    prev_r1 = r1;
    prev_r2 = r2;
  }
  EXPECT_DOUBLE_EQ(0.5 / kProfile(0.5), 0.5);
  EXPECT_DOUBLE_EQ(2.0 / kProfile(2.0), 2.0);
}

TEST(BetaProfile, SlopeMarginAndAmplitudeGuard) {
  EXPECT_GE(BetaProfile::min_h_slope(32.0), 0.75 + 0.05);
  EXPECT_NO_THROW(BetaProfile(40.0));
  // The bump slope bound scales with the amplitude; 0.25 / 0.0962 * 32 ~ 83.
  EXPECT_THROW(BetaProfile(120.0), DomainError);
  EXPECT_THROW(BetaProfile(0.0), DomainError);
}

TEST(BetaProfile, SolveSquareRatioInvertsThetaOverBetaSquared) {
  prop::Gen gen(31);
  for (int i = 0; i < 2000; ++i) {
    const double th = gen.uniform(0.5, 2.0);
    const double b = kProfile(th);
    ASSERT_NEAR(kProfile.solve_sq_ratio(th / (b * b)), th, 1e-13);
  }
}

TEST(ApplyG, Examples) {
  expect_point(apply_g(QuadrantPoint::from_xy(1, 1)), 2.0, 0.5);
  const auto p = QuadrantPoint::from_xy(0.3, 7.0);
  EXPECT_EQ(apply_g_inverse(apply_g(p)), p);
  auto q = QuadrantPoint::from_xy(0.25, 4.0);
  for (int i = 0; i < 3; ++i) q = apply_g(q);
  expect_point(q, 2.0, 0.5);
}

TEST(ApplyK, Examples) {
  expect_point(apply_k(QuadrantPoint::from_xy(1, 0.6), kProfile), 1.0, 0.6);
  const auto q = apply_k(QuadrantPoint::from_xy(1, 0.875), kProfile);
  EXPECT_NEAR(q.x(), oracle::kBeta0875, 1e-14);
  EXPECT_NEAR(q.y(), oracle::kKImageY, 1e-14);
  expect_point(apply_k(QuadrantPoint::from_xy(2, 1), kProfile), 2.0, 1.0);
  try {
    apply_k(QuadrantPoint::from_xy(1, 2), kProfile);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("sector error"), std::string::npos);
  }
}

TEST(ApplyK, InverseOnSector) {
  prop::Gen gen(32);
  for (int i = 0; i < 2000; ++i) {
    const double lx = gen.uniform(-5, 5);
    const auto p = QuadrantPoint::from_logs(lx, lx + gen.uniform(-kLn2, kLn2 * 0.999));
    const auto q = apply_k(p, kProfile);
    ASSERT_TRUE(in_sector(q));
    const auto back = apply_k_inverse(q, kProfile);
    ASSERT_NEAR(back.lx(), p.lx(), 1e-12);
    ASSERT_EQ(back.leaf_log(), p.leaf_log());
  }
}

TEST(ApplyF, Examples) {
  expect_point(apply_f(QuadrantPoint::from_xy(1, 0.6), kProfile), 2.0, 0.3);
  expect_point(apply_f(QuadrantPoint::from_xy(1, 4), kProfile), 2.0, 2.0);
  // theta = 2 takes the g branch.
  expect_point(apply_f(QuadrantPoint::from_xy(1, 2), kProfile), 2.0, 1.0);
  const auto b = apply_f(BoundaryPoint::on_delta(0.8), kProfile);
  EXPECT_EQ(b.side, Side::delta);
  EXPECT_DOUBLE_EQ(b.coord, 0.4);
  EXPECT_DOUBLE_EQ(apply_f(BoundaryPoint::on_delta_prime(0.8), kProfile).coord, 1.6);
}

TEST(ApplyF, InverseRoundTrip) {
  prop::Gen gen(33);
  for (int i = 0; i < 5000; ++i) {
    const auto p = gen.quadrant_point();
    const auto back = apply_f_inverse(apply_f(p, kProfile), kProfile);
    ASSERT_NEAR(back.lx(), p.lx(), 1e-12);
    ASSERT_EQ(back.leaf_log(), p.leaf_log());
  }
}

TEST(ReebHomeo, LeafPreservationIsBitExact) {
  prop::Gen gen(34);
  const ReebHomeo maps[] = {ReebHomeo::hyperbolic_g(), ReebHomeo::counterexample(),
                            ReebHomeo::composite({ReebHomeo::counterexample(), ReebHomeo::hyperbolic_g()})};
  for (int i = 0; i < 10000; ++i) {
    const auto p = gen.quadrant_point();
    for (const auto& f : maps) ASSERT_EQ(f.forward(p).leaf_log(), p.leaf_log()) << f.name();
  }
}

TEST(ReebHomeo, ForwardMotion) {
  prop::Gen gen(35);
  const ReebHomeo f = ReebHomeo::counterexample();
  for (int i = 0; i < 10000; ++i) {
    const auto p = gen.quadrant_point();
    ASSERT_GT(f.forward(p).lx(), p.lx());
    ASSERT_LT(f.backward(p).lx(), p.lx());
  }
}

TEST(ReebHomeo, CompositeAppliesPartsInOrder) {
  const ReebHomeo g = ReebHomeo::hyperbolic_g();
  const ReebHomeo c = ReebHomeo::composite({g, ReebHomeo::counterexample()});
  const auto p = QuadrantPoint::from_xy(0.5, 0.875 * 2);
  const auto expected = apply_f(apply_g(p), kProfile);
  EXPECT_EQ(c.forward(p), expected);
  EXPECT_NEAR(c.backward(expected).lx(), p.lx(), 1e-12);
  EXPECT_EQ(c.name(), "composite(hyperbolic_g,counterexample)");
  EXPECT_DOUBLE_EQ(c.forward(BoundaryPoint::on_delta(1.0)).coord, 0.25);
  EXPECT_THROW(ReebHomeo::composite({}), DomainError);
}

TEST(IterateClosedForm, Examples) {
  const auto p = iterate_closed_form(QuadrantPoint::from_xy(1.2 * std::ldexp(1.0, -20), 0.7), 20, kProfile);
  EXPECT_NEAR(p.x(), 1.2, 1e-12);
  EXPECT_NEAR(p.y(), 0.7 * std::ldexp(1.0, -20), 1e-18);
  const double d = oracle::kDelta;
  const auto x0 = QuadrantPoint::from_xy(std::ldexp(1.0, -20) / d, d * 0.7499);
  const auto detail = iterate_closed_form_detail(x0, 20, kProfile);
  EXPECT_NEAR(detail.point.x(), oracle::kRow8Limit, 1e-12);
  ASSERT_TRUE(detail.crossing_step);
  EXPECT_NEAR(detail.crossing_theta, 0.758, 1e-12);
  EXPECT_EQ(iterate_closed_form(x0, 0, kProfile), x0);
}

TEST(IterateClosedForm, MatchesDirectIteration) {
  prop::Gen gen(36);
  const ReebHomeo f = ReebHomeo::counterexample();
  for (int i = 0; i < 1000; ++i) {
    const auto x0 = gen.admissible_start();
    const int n = gen.integer(0, 60);
    const auto direct = f.iterate(x0, n);
    const auto closed = iterate_closed_form(x0, n, kProfile);
    ASSERT_NEAR(closed.lx(), direct.lx(), 1e-12) << i;
    ASSERT_NEAR(closed.ly(), direct.ly(), 1e-12) << i;
  }
}

TEST(IterateClosedForm, RejectsNegativeSteps) {
  EXPECT_THROW(iterate_closed_form(QuadrantPoint::from_xy(1, 4), -1, kProfile), DomainError);
}

TEST(SectorCrossing, ExactlyOnceFromThetaAtLeastTwo) {
  prop::Gen gen(37);
  const ReebHomeo f = ReebHomeo::counterexample();
  for (int i = 0; i < 2000; ++i) {
    auto p = gen.admissible_start();
    int crossings = 0;
    for (int step = 0; step < 80; ++step) {
      crossings += in_sector(p) ? 1 : 0;
      p = f.forward(p);
    }
    ASSERT_EQ(crossings, 1) << i;
  }
}

TEST(CounterexampleParams, DefaultsValidateAndDriftIsCaught) {
  CounterexampleParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_NEAR(p.delta * p.delta * p.b / p.a, 0.758, 1e-12);
  CounterexampleParams bad = p;
  bad.c = 0.9;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = p;
  bad.delta = 1.2;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = p;
  bad.d = 0.55;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(StripLeaf, Examples) {
  const auto p = strip_leaf(0.0, 0.0);
  EXPECT_DOUBLE_EQ(p.x, -1.0);
  EXPECT_DOUBLE_EQ(p.y, 0.0);
  EXPECT_DOUBLE_EQ(strip_leaf(5.0, 0.0).x, 4.0);
  EXPECT_LT(strip_leaf(0.0, 0.999999).x, -1e5);
  EXPECT_LT(strip_leaf(0.0, -0.999999).x, -1e5);
  EXPECT_THROW(strip_leaf(0.0, 1.0), DomainError);
}
