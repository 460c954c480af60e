#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ergolab/hyperbolic.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/random.hpp"

using namespace ergolab;

namespace {

// Direct transcription of the Pliss condition, O(n^2) per orbit.
std::vector<std::size_t> brute_pliss(const Orbit& o, double sigma) {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= o.length; ++n) {
    bool ok = true;
    for (std::size_t k = 1; k <= n && ok; ++k) {
      double prod = 1.0;
      for (std::size_t j = n - k; j < n; ++j) prod *= o.inv_norms[j];
      ok = prod <= std::pow(sigma, static_cast<double>(k)) * (1 + 1e-12);
    }
    if (ok) out.push_back(n);
  }
  return out;
}

}  // namespace

TEST(Pliss, TimesTwoAllTimesAtHalf) {
  auto rec = detect_pliss(orbit(MapSystem::circle_times_d(2), CircleAngle(0.123), 40), 0.5);
  ASSERT_EQ(rec.times.size(), 40u);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(rec.times[i], i + 1);
}

TEST(Pliss, TimesTwoNoneBelowHalf) {
  auto rec = detect_pliss(orbit(MapSystem::circle_times_d(2), CircleAngle(0.123), 40), 0.4);
  EXPECT_TRUE(rec.times.empty());
}

TEST(Pliss, QuadraticFromTwo) {
  auto o = orbit(MapSystem::quadratic(2.0), IntervalCoord(2.0), 5);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(o.inv_norms[i], 0.25);
  auto rec = detect_pliss(o, 0.5);
  EXPECT_EQ(rec.times, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
}

TEST(Pliss, CriticalPointTruncates) {
  auto rec = detect_pliss(orbit(MapSystem::quadratic(2.0), IntervalCoord(0.0), 5), 0.5);
  EXPECT_TRUE(rec.truncated);
  EXPECT_TRUE(rec.times.empty());
}

TEST(Pliss, MatchesBruteForceOnRandomOrbits) {
  for (double a : {1.8, misiurewicz_a0(), 2.0}) {
    MapSystem m = MapSystem::quadratic(a);
    for (const auto& p : sample_phase_points(m, 20, 5)) {
      Orbit o = orbit(m, p, 200);
      if (std::any_of(o.inv_norms.begin(), o.inv_norms.end(), [](double v) { return std::isinf(v); })) continue;
      for (double sigma : {0.5, 0.8, 0.95}) {
        EXPECT_EQ(detect_pliss(o, sigma).times, brute_pliss(o, sigma));
      }
    }
  }
}

TEST(Frequency, Examples) {
  HyperbolicTimeRecord all{"", 0.5, 100, {}, false};
  for (std::size_t i = 1; i <= 100; ++i) all.times.push_back(i);
  EXPECT_EQ(frequency(all, 100), 1.0);

  HyperbolicTimeRecord none{"", 0.5, 100, {}, false};
  EXPECT_EQ(frequency(none, 100), 0.0);

  HyperbolicTimeRecord even{"", 0.5, 100, {}, false};
  for (std::size_t i = 2; i <= 100; i += 2) even.times.push_back(i);
  EXPECT_EQ(frequency(even, 100), 0.5);
  EXPECT_THROW(frequency(even, 0), ContractError);
  EXPECT_THROW(frequency(even, 101), ContractError);
}

TEST(Frequency, TruncationIsMonotone) {
  auto rec = detect_pliss(orbit(MapSystem::quadratic(1.9), IntervalCoord(0.31), 300), 0.9);
  auto cut = truncate(rec, 150);
  EXPECT_EQ(cut.horizon, 150u);
  for (std::size_t t : cut.times) EXPECT_LE(t, 150u);
  EXPECT_EQ(frequency(cut, 150), frequency(rec, 150));
}

TEST(PreBall, CircleExamples) {
  MapSystem m = MapSystem::circle_times_d(2);
  PreBall pb = preball(m, CircleAngle(0.5), 2, 0.1);
  EXPECT_NEAR(pb.interval.lo, 0.475, 1e-15);
  EXPECT_NEAR(pb.interval.hi, 0.525, 1e-15);
  PreBall zero = preball(m, CircleAngle(0.5), 0, 0.1);
  EXPECT_NEAR(zero.interval.lo, 0.4, 1e-15);
  EXPECT_NEAR(zero.interval.hi, 0.6, 1e-15);
}

TEST(PreBall, QuadraticFixedPoint) {
  PreBall pb = preball(MapSystem::quadratic(2.0), IntervalCoord(-2.0), 1, 0.1);
  // image ball (-2.1, -1.9) clipped to (-2, -1.9); negative branch y = -sqrt(2 - v)
  EXPECT_NEAR(pb.interval.lo, -2.0, 1e-12);
  EXPECT_NEAR(pb.interval.hi, -std::sqrt(3.9), 1e-12);
}

TEST(PreBall, FoldIsRejected) {
  // the critical point sits inside the pullback of a ball around f(0) = 2
  EXPECT_THROW(preball(MapSystem::quadratic(2.0), IntervalCoord(0.0), 1, 0.1), ComputationError);
}

TEST(DynamicalBall, Examples) {
  MapSystem m = MapSystem::circle_times_d(2);
  Interval b = dynamical_ball_1d(m, CircleAngle(0.5), 2, 0.1);
  EXPECT_NEAR(b.lo, 0.475, 1e-15);
  EXPECT_NEAR(b.hi, 0.525, 1e-15);
  Interval zero = dynamical_ball_1d(MapSystem::quadratic(1.7), IntervalCoord(0.3), 0, 0.2);
  EXPECT_NEAR(zero.lo, 0.1, 1e-15);
  EXPECT_NEAR(zero.hi, 0.5, 1e-15);
  EXPECT_TRUE(dynamical_ball_1d(m, CircleAngle(0.3), 0, 0.5).full);
}

TEST(DynamicalBall, EqualsPreBallOnExpandingCircleMaps) {
  for (int d : {2, 3, 5}) {
    MapSystem m = MapSystem::circle_times_d(d);
    Rng rng(100 + d);
    for (int i = 0; i < 200; ++i) {
      CircleAngle x(rng.uniform());
      int n = static_cast<int>(rng.below(11));
      double delta = rng.uniform(0.01, 0.2);
      PreBall pb = preball(m, x, n, delta);
      Interval b = dynamical_ball_1d(m, x, n, delta);
      ASSERT_NEAR(pb.interval.lo, b.lo, 1e-10) << "d=" << d << " x=" << x.theta << " n=" << n;
      ASSERT_NEAR(pb.interval.hi, b.hi, 1e-10);
      ASSERT_TRUE(pb.interval.contains(x.theta) || pb.interval.contains(x.theta + 1.0) ||
                  pb.interval.contains(x.theta - 1.0));
    }
  }
}

TEST(Contraction, TimesTwoIsExact) {
  auto rep = verify_metric_contraction(MapSystem::circle_times_d(2), CircleAngle(0.3141), 5, 0.5, 0.1, 500, 1);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.worst_ratio, 1.0);
}

TEST(Contraction, TimesThreeHasSlack) {
  auto rep = verify_metric_contraction(MapSystem::circle_times_d(3), CircleAngle(0.2718), 4, 0.5, 0.1, 500, 2);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.worst_ratio, 2.0 / 3.0, 1e-9);
}

TEST(Contraction, QuadraticFromTwoAgreesWithPairGrid) {
  MapSystem m = MapSystem::quadratic(2.0);
  auto rep = verify_metric_contraction(m, IntervalCoord(2.0), 3, 0.5, 0.05, 1000, 3);
  EXPECT_TRUE(rep.passed);
  // brute force over a 1000-point grid of the pre-ball
  PreBall pb = preball(m, IntervalCoord(2.0), 3, 0.05);
  double worst = 0;
  std::vector<Orbit> orbits;
  for (int i = 0; i < 1000; ++i) {
    double y = pb.interval.lo + (i + 0.5) / 1000 * pb.interval.length();
    orbits.push_back(orbit(m, IntervalCoord(y), 3));
  }
  for (int i = 0; i + 1 < 1000; i += 7) {
    for (int j = i + 1; j < 1000; j += 13) {
      auto x = [&](int k, int s) { return std::get<IntervalCoord>(orbits[k].points[s]).x; };
      double dn = std::abs(x(i, 3) - x(j, 3));
      for (int s = 0; s < 3; ++s) worst = std::max(worst, std::abs(x(i, s) - x(j, s)) / (std::pow(0.5, 3 - s) * dn));
    }
  }
  EXPECT_LE(worst, 1.0);
  EXPECT_LE(rep.worst_ratio, 1.0 + 1e-9);
}

TEST(Classify, TimesTwoAllH) {
  MapSystem m = MapSystem::circle_times_d(2);
  auto c = classify(m, sample_phase_points(m, 50, 4), 0.6, 200, 0.5);
  EXPECT_EQ(c.count(HLabel::H), 50u);
  for (const auto& e : c.entries) EXPECT_EQ(e.frequency, 1.0);
}

TEST(Classify, TimesTwoAllHcBelowHalf) {
  MapSystem m = MapSystem::circle_times_d(2);
  auto c = classify(m, sample_phase_points(m, 50, 4), 0.4, 200, 0.05);
  EXPECT_EQ(c.count(HLabel::Hc), 50u);
  EXPECT_EQ(c.h_fraction(), 0.0);
}

TEST(Classify, ResultIndependentOfThreadCount) {
  MapSystem m = MapSystem::viana(16, misiurewicz_a0(), 0.01);
  auto seeds = sample_phase_points(m, 64, 9);
  set_thread_count(1);
  auto a = classification_csv(classify(m, seeds, 0.9, 500, 0.05));
  set_thread_count(4);
  auto b = classification_csv(classify(m, seeds, 0.9, 500, 0.05));
  set_thread_count(0);
  EXPECT_EQ(a, b);
}

TEST(SlowApproximation, Examples) {
  Orbit far = orbit(MapSystem::circle_times_d(2), CircleAngle(0.1), 100);
  EXPECT_EQ(slow_approx_average(far, 0.1).value, 0.0);

  Orbit o = orbit(MapSystem::quadratic(2.0), IntervalCoord(2.0), 100);
  for (auto& d : o.crit_dists) d = 1.0;
  o.crit_dists[37] = std::exp(-1.0);
  EXPECT_NEAR(slow_approx_average(o, 0.5).value, 0.01, 1e-15);
}

TEST(Csv, HyperbolicTimesLayout) {
  auto rec = detect_pliss(orbit(MapSystem::circle_times_d(2), CircleAngle(0.1), 3), 0.5);
  EXPECT_EQ(hyperbolic_times_csv(rec), "n_hyperbolic\n1\n2\n3\n");
  EXPECT_EQ(hyperbolic_summary_csv(rec).substr(0, 24), "sigma,horizon,frequency\n");
}
