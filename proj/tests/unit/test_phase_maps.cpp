#include <gtest/gtest.h>

#include <cmath>

#include "ergolab/maps.hpp"
#include "ergolab/random.hpp"

using namespace ergolab;

TEST(Phase, WrapKeepsUnitInterval) {
  EXPECT_EQ(wrap_unit(1.25), 0.25);
  EXPECT_EQ(wrap_unit(-0.25), 0.75);
  EXPECT_EQ(wrap_unit(-1e-300), 0.0);
  EXPECT_EQ(CircleAngle(3.0).theta, 0.0);
}

TEST(Phase, Distances) {
  EXPECT_NEAR(distance(Metric::CircleArc, CircleAngle(0.9), CircleAngle(0.1)), 0.2, 1e-15);
  EXPECT_NEAR(distance(Metric::CylinderMax, CylinderPoint(0, 1), CylinderPoint(0.5, 1.2)), 0.5, 1e-15);
  SymbolWord a(2, {0, 1, 1, 0});
  SymbolWord b(2, {0, 1, 0, 0});
  EXPECT_EQ(distance(Metric::WordMetric, a, b), 0.25);
  EXPECT_EQ(distance(Metric::WordMetric, a, a), 0.0);
  EXPECT_EQ(distance(Metric::Euclidean1D, IntervalCoord(-1.5), IntervalCoord(0.25)), 1.75);
}

TEST(Phase, MismatchedPointsAreRejected) {
  EXPECT_THROW(distance(Metric::CircleArc, CircleAngle(0.1), IntervalCoord(0.1)), ContractError);
  EXPECT_THROW(SymbolWord(2, {0, 2}), ContractError);
}

TEST(Phase, CircleArcIsSymmetricAndBounded) {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    double a = rng.uniform(), b = rng.uniform();
    double d = circle_arc(a, b);
    EXPECT_EQ(d, circle_arc(b, a));
    EXPECT_LE(d, 0.5);
    EXPECT_GE(d, 0.0);
  }
}

TEST(Maps, StepExamples) {
  auto c = std::get<CircleAngle>(step(MapSystem::circle_times_d(2), CircleAngle(0.3)));
  EXPECT_NEAR(c.theta, 0.6, 1e-15);

  auto v = std::get<CylinderPoint>(step(MapSystem::viana(16, 1.9, 0.0), CylinderPoint(0.0, 1.0)));
  EXPECT_EQ(v.theta, 0.0);
  EXPECT_NEAR(v.x, 0.9, 1e-15);

  auto w = std::get<SymbolWord>(step(MapSystem::full_shift(3), SymbolWord(3, {0, 1, 2})));
  EXPECT_EQ(w.symbols, (std::vector<std::uint8_t>{1, 2}));
  EXPECT_THROW(step(MapSystem::full_shift(3), SymbolWord(3, {1})), ComputationError);
}

TEST(Maps, OrbitExamples) {
  Orbit o = orbit(MapSystem::circle_times_d(2), CircleAngle(0.1), 3);
  ASSERT_EQ(o.points.size(), 4u);
  const double expect[] = {0.1, 0.2, 0.4, 0.8};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::get<CircleAngle>(o.points[i]).theta, expect[i], 1e-15);

  Orbit q = orbit(MapSystem::quadratic(2.0), IntervalCoord(2.0), 2);
  EXPECT_EQ(std::get<IntervalCoord>(q.points[1]).x, -2.0);
  EXPECT_EQ(std::get<IntervalCoord>(q.points[2]).x, -2.0);
}

TEST(Maps, OrbitEscapeNamesTheStep) {
  try {
    orbit(MapSystem::quadratic(2.0), IntervalCoord(2.5), 5);
    FAIL() << "expected an escape";
  } catch (const DomainEscape& e) {
    EXPECT_EQ(e.step(), 0u);
  }
}

TEST(Maps, VianaOrbitStaysInCylinder) {
  MapSystem m = MapSystem::viana(16, misiurewicz_a0(), 0.01);
  for (const auto& p : sample_phase_points(m, 8, 3)) {
    Orbit o = orbit(m, p, 10000);
    for (const auto& q : o.points) ASSERT_TRUE(in_domain(m, q));
  }
}

TEST(Maps, InverseDerivativeNorm) {
  EXPECT_EQ(inv_deriv_norm(MapSystem::circle_times_d(2), CircleAngle(0.37)), 0.5);
  EXPECT_EQ(inv_deriv_norm(MapSystem::quadratic(1.7), IntervalCoord(1.0)), 0.5);
  EXPECT_NEAR(inv_deriv_norm(MapSystem::viana(16, 1.9, 0.0), CylinderPoint(0.0, 1.0)), 0.5, 1e-15);
  EXPECT_TRUE(std::isinf(inv_deriv_norm(MapSystem::quadratic(2.0), IntervalCoord(0.0))));
}

TEST(Maps, VianaInverseNormMatchesSingularValues) {
  // brute-force operator norm of Df^{-1} over unit vectors
  MapSystem m = MapSystem::viana(16, misiurewicz_a0(), 0.01);
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    CylinderPoint p(rng.uniform(), rng.uniform(-1.5, 1.5));
    const double d = 16, bprime = 0.01 * 2 * M_PI * std::cos(2 * M_PI * p.theta), q = -2 * p.x;
    // Df = [[d, 0], [b', q]], inverse = [[1/d, 0], [-b'/(d q), 1/q]]
    double best = 0;
    for (int k = 0; k < 20000; ++k) {
      double t = M_PI * k / 20000;
      double u = std::cos(t), v = std::sin(t);
      double a = u / d, b = -bprime * u / (d * q) + v / q;
      best = std::max(best, std::hypot(a, b));
    }
    EXPECT_NEAR(inv_deriv_norm(m, p), best, 1e-6 * best);
  }
}

TEST(Maps, DistDelta) {
  MapSystem v = MapSystem::viana(16, misiurewicz_a0(), 0.01);
  EXPECT_EQ(dist_delta(v, CylinderPoint(0.2, 0.3), 0.5), 0.3);
  EXPECT_EQ(dist_delta(v, CylinderPoint(0.2, 0.8), 0.5), 1.0);
  EXPECT_EQ(dist_delta(MapSystem::circle_times_d(3), CircleAngle(0.1), 0.2), 1.0);
}

TEST(Maps, InverseBranches) {
  auto pre = inverse_branches(MapSystem::circle_times_d(2), CircleAngle(0.5), 1);
  ASSERT_EQ(pre.size(), 2u);
  EXPECT_EQ(std::get<CircleAngle>(pre[0].point).theta, 0.25);
  EXPECT_EQ(std::get<CircleAngle>(pre[1].point).theta, 0.75);

  auto two = inverse_branches(MapSystem::circle_times_d(2), CircleAngle(0.0), 2);
  ASSERT_EQ(two.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(std::get<CircleAngle>(two[i].point).theta, 0.25 * i);

  auto q = inverse_branches(MapSystem::quadratic(2.0), IntervalCoord(2.0), 1);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(std::get<IntervalCoord>(q[0].point).x, 0.0);
}

TEST(Maps, InverseBranchesMapForward) {
  MapSystem m = MapSystem::quadratic(1.8);
  for (const auto& pre : inverse_branches(m, IntervalCoord(0.3), 4)) {
    PhasePoint p = pre.point;
    for (int i = 0; i < 4; ++i) p = step(m, p);
    EXPECT_NEAR(std::get<IntervalCoord>(p).x, 0.3, 1e-9);
  }
}

// Independent bisection on g(a) = Q_a^3(0) - p+(a), in long double.
TEST(Maps, MisiurewiczParameterMatchesBisection) {
  auto g = [](long double a) {
    long double x = 0;
    for (int i = 0; i < 3; ++i) x = a - x * x;
    return x - (-1.0L + std::sqrt(1.0L + 4.0L * a)) / 2.0L;
  };
  long double lo = 1.5L, hi = 1.6L;
  ASSERT_LT(g(lo) * g(hi), 0);
  for (int i = 0; i < 200; ++i) {
    long double mid = (lo + hi) / 2;
    (g(lo) * g(mid) <= 0 ? hi : lo) = mid;
  }
  const double a = misiurewicz_a0();
  EXPECT_NEAR(a, static_cast<double>(lo), 1e-15);
  EXPECT_LE(std::abs(static_cast<double>(g(a))), 1e-12);
  EXPECT_GT(2.0 * quadratic_positive_fixed_point(a), 1.0);
}

TEST(Maps, EndpointParameterLandsOnMinusTwo) {
  MapSystem m = MapSystem::quadratic(2.0);
  Orbit o = orbit(m, IntervalCoord(0.0), 3);
  EXPECT_EQ(std::get<IntervalCoord>(o.points[3]).x, -2.0);
}

TEST(Maps, VianaInvariantRadiusMatchesOracle) {
  // oracle: smallest lattice beta above a_max, computed in numpy
  EXPECT_NEAR(viana_invariant_radius(misiurewicz_a0(), 0.01, ForcingFunction::sine()), 1.55369, 1e-12);
}

TEST(Maps, Validation) {
  try {
    MapSystem::circle_times_d(1);
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("degree must be >= 2"), std::string::npos);
  }
  EXPECT_THROW(MapSystem::quadratic(2.5), ContractError);
  EXPECT_THROW(MapSystem::full_shift(1), ContractError);
}

TEST(Maps, OrbitCsvLayout) {
  Orbit o = orbit(MapSystem::circle_times_d(2), CircleAngle(0.1), 2);
  std::string csv = orbit_csv(o);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,theta,x,inv_deriv_norm,crit_dist");
  EXPECT_NE(csv.find("\n0,0.1,,0.5,"), std::string::npos);
}
