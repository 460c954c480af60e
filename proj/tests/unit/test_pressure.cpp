#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ergolab/pressure.hpp"
#include "ergolab/random.hpp"

using namespace ergolab;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

Potential random_prefix(Rng& rng, int k, int p, double scale) {
  std::size_t size = 1;
  for (int i = 0; i < p; ++i) size *= static_cast<std::size_t>(k);
  std::vector<double> v(size);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return Potential::prefix_table(k, p, v);
}

}  // namespace

TEST(LogSumExp, AgainstNaiveSum) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + rng.below(200));
    double naive = 0;
    for (auto& x : v) {
      x = rng.uniform(-20, 20);
      naive += std::exp(x);
    }
    EXPECT_NEAR(log_sum_exp(v), std::log(naive), 1e-12);
  }
  std::vector<double> huge{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(huge), 1000.0 + kLog2, 1e-12);
  EXPECT_EQ(log_sum_exp({}), -INFINITY);
}

TEST(LeastSquares, ExactLine) {
  std::vector<double> x{1, 2, 3, 4};
  std::vector<double> y{0.5, 2.5, 4.5, 6.5};
  EXPECT_NEAR(least_squares_slope(x, y), 2.0, 1e-14);
}

TEST(SeparatedSet, SmallExamples) {
  auto m = MapSystem::circle_times_d(2);
  // spacing 1/12: greedy keeps every fourth point
  auto s = build_separated(m, 0, 0.3, 12);
  EXPECT_EQ(s.points.size(), 3u);
  EXPECT_EQ(build_separated(m, 0, 0.6, 64).points.size(), 1u);
  EXPECT_THROW(build_separated(m, 2, 0.01, 50), ContractError);
}

TEST(SeparatedSet, PairwiseSeparatedAndMaximal) {
  auto m = MapSystem::quadratic(1.9);
  const int n = 3;
  const double eps = 0.05;
  auto s = build_separated(m, n, eps, 2000);
  auto dn = [&](const PhasePoint& p, const PhasePoint& q) {
    Orbit a = orbit(m, p, n), b = orbit(m, q, n);
    double d = 0;
    for (int i = 0; i <= n; ++i) d = std::max(d, distance(Metric::Euclidean1D, a.points[i], b.points[i]));
    return d;
  };
  for (std::size_t i = 0; i < s.points.size(); ++i)
    for (std::size_t j = i + 1; j < s.points.size(); ++j) ASSERT_GT(dn(s.points[i], s.points[j]), eps);
  // every grid point is within eps of the set
  auto grid = uniform_grid(m, 2000);
  for (std::size_t g = 0; g < grid.size(); g += 37) {
    double best = INFINITY;
    for (const auto& p : s.points) best = std::min(best, dn(grid[g], p));
    ASSERT_LE(best, eps);
  }
}

TEST(SeparatedSet, BucketedScanMatchesNaiveGreedy) {
  struct Case {
    MapSystem map;
    int n;
    double eps;
    std::size_t res;
    std::size_t x_res;
  };
  std::vector<Case> cases{{MapSystem::circle_times_d(3), 9, 0.1, 4096, 0},
                          {MapSystem::quadratic(1.95), 8, 0.05, 3000, 0},
                          {MapSystem::viana(4, misiurewicz_a0(), 0.01), 4, 0.2, 64, 32}};
  for (const auto& c : cases) {
    auto grid = uniform_grid(c.map, c.res, c.x_res);
    std::vector<Orbit> kept;
    for (const auto& p : grid) {
      Orbit o = orbit(c.map, p, static_cast<std::size_t>(c.n));
      bool far = true;
      for (const auto& q : kept) {
        double d = 0;
        for (int i = 0; i <= c.n; ++i) d = std::max(d, distance(c.map.metric(), o.points[i], q.points[i]));
        if (d < c.eps) {
          far = false;
          break;
        }
      }
      if (far) kept.push_back(std::move(o));
    }
    auto set = build_separated(c.map, c.n, c.eps, c.res, c.x_res);
    ASSERT_EQ(set.points.size(), kept.size()) << c.map.id();
    for (std::size_t i = 0; i < kept.size(); ++i) ASSERT_EQ(describe(set.points[i]), describe(kept[i].initial));
  }
}

TEST(SeparatedSet, CardinalityDoublesOnTimesTwo) {
  auto m = MapSystem::circle_times_d(2);
  // keep roughly 40 candidates per separated point so the grid never saturates
  auto card = [&](int n, double eps) {
    std::size_t res = 1 << 12;
    while (static_cast<double>(res) < 40.0 * std::ldexp(1.0, n) / eps) res <<= 1;
    return static_cast<double>(build_separated(m, n, eps, res).points.size());
  };
  for (double eps : {0.1, 0.05}) {
    double prev = card(2, eps);
    for (int n = 3; n <= 12; ++n) {
      double cur = card(n, eps);
      EXPECT_GE(cur / prev, 1.9) << "n=" << n << " eps=" << eps;
      EXPECT_LE(cur / prev, 2.1) << "n=" << n << " eps=" << eps;
      prev = cur;
    }
  }
}

TEST(SeparatedPressure, ConstantShiftsByConstant) {
  auto m = MapSystem::circle_times_d(3);
  auto base = pressure_separated(m, Potential::constant(0.0), {2, 4, 6}, {0.02}, 1 << 15);
  auto shifted = pressure_separated(m, Potential::constant(0.37), {2, 4, 6}, {0.02}, 1 << 15);
  EXPECT_NEAR(shifted.value - base.value, 0.37, 1e-9);
  EXPECT_EQ(base.columns, (std::vector<std::string>{"n", "eps", "cardinality", "log_Z", "rate"}));
}

TEST(SeparatedPressure, TopologicalEntropyOfTimesD) {
  for (int d : {2, 3}) {
    auto est = pressure_separated(MapSystem::circle_times_d(d), Potential::constant(0.0), {2, 4, 6, 8}, {0.01},
                                  1 << 20);
    EXPECT_NEAR(est.value, std::log(static_cast<double>(d)), 0.03 * std::log(static_cast<double>(d))) << est.note;
  }
}

TEST(SeparatedPressure, RequiresIncreasingN) {
  auto m = MapSystem::circle_times_d(2);
  EXPECT_THROW(pressure_separated(m, Potential(), {4, 2}, {0.1}, 1024), ContractError);
}

TEST(SeparatedPressure, CsvAndSummary) {
  auto est = pressure_separated(MapSystem::circle_times_d(2), Potential(), {1, 2, 3}, {0.1}, 4096);
  std::string csv = pressure_table_csv(est);
  EXPECT_EQ(csv.rfind("n,eps,cardinality,log_Z,rate\n", 0), 0u);
  EXPECT_EQ(pressure_summary_line(est).rfind("separated_sets,", 0), 0u);
  EXPECT_EQ(pressure_summary_line(est), pressure_summary_line(est));
}

TEST(Monotonicity, OrderedPotentialsOnFixedSets) {
  auto m = MapSystem::circle_times_d(2);
  std::vector<std::vector<SeparatedSet>> sets(1);
  for (int n : {2, 4, 6}) sets[0].push_back(build_separated(m, n, 0.05, 1 << 14));
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    double t = rng.uniform(-1, 1);
    double c = rng.uniform(0, 0.5);
    Potential phi = Potential::analytic(AnalyticFamily::CosTheta, t);
    auto a = pressure_on_sets(m, phi, sets);
    auto b = pressure_on_sets(m, phi.plus(c), sets);
    ASSERT_LE(a.value, b.value + 1e-12);
    for (const auto& row : sets[0]) ASSERT_LE(log_partition(m, phi, row), log_partition(m, phi.plus(c), row) + 1e-12);
  }
}

TEST(Monotonicity, ShiftCaratheodoryOnRandomTables) {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    Potential phi = random_prefix(rng, 2, 2, 1.0);
    const auto& base = std::get<PrefixTable>(phi.kind()).values;
    std::vector<double> bigger(base);
    for (auto& v : bigger) v += rng.uniform(0, 0.5);
    Potential psi = Potential::prefix_table(2, 2, bigger);
    double a = relative_pressure_shift(2, phi, LambdaSpec::whole(), 1, 12, 1e-8).value;
    double b = relative_pressure_shift(2, psi, LambdaSpec::whole(), 1, 12, 1e-8).value;
    ASSERT_LE(a, b + 2e-8) << "pair " << i;
  }
}

TEST(Caratheodory, ClosedForms) {
  // sum over depth n of 2^n e^{-0.8 n} is minimised at depth n_max
  EXPECT_NEAR(caratheodory_m(2, Potential(), LambdaSpec::whole(), 1, 0.8, 20), std::exp((kLog2 - 0.8) * 20), 1e-9);
  EXPECT_NEAR(caratheodory_m(2, Potential(), LambdaSpec::whole(), 1, 0.8, 20), 0.118002, 1e-6);
  EXPECT_NEAR(caratheodory_m(2, Potential(), LambdaSpec::whole(), 1, kLog2, 20), 1.0, 1e-12);
  EXPECT_NEAR(caratheodory_m(2, Potential(), LambdaSpec::sub_alphabet({0}), 1, 0.5, 16), std::exp(-0.5 * 16), 1e-15);
  EXPECT_NEAR(caratheodory_log_m(3, Potential::constant(0.2), LambdaSpec::whole(), 1, 1.5, 10),
              (kLog3 + 0.2 - 1.5) * 10, 1e-9);
  // gamma below log 3 + 0.2: the depth-1 cover wins
  EXPECT_NEAR(caratheodory_log_m(3, Potential::constant(0.2), LambdaSpec::whole(), 1, 1.0, 10), kLog3 + 0.2 - 1.0,
              1e-12);
  // gamma below the pressure: m grows, the best cover is the depth-N one
  EXPECT_NEAR(caratheodory_log_m(2, Potential(), LambdaSpec::whole(), 3, 0.3, 20), 3 * (kLog2 - 0.3), 1e-12);
}

TEST(Caratheodory, RelativePressureExamples) {
  EXPECT_NEAR(relative_pressure_shift(2, Potential(), LambdaSpec::whole(), 1, 24, 1e-9).value, kLog2, 1e-7);
  EXPECT_NEAR(relative_pressure_shift(3, Potential(), LambdaSpec::sub_alphabet({0, 1}), 1, 24, 1e-9).value, kLog2,
              1e-7);
  EXPECT_NEAR(relative_pressure_shift(3, Potential(), LambdaSpec::whole(), 1, 24, 1e-9).value, kLog3, 1e-7);
  EXPECT_NEAR(relative_pressure_shift(2, Potential::constant(0.25), LambdaSpec::whole(), 1, 24, 1e-9).value,
              kLog2 + 0.25, 1e-7);
  // negative pressure needs the bracket to widen downwards
  EXPECT_NEAR(relative_pressure_shift(2, Potential::constant(-3.0), LambdaSpec::whole(), 1, 24, 1e-9).value,
              kLog2 - 3.0, 1e-7);
  auto est = relative_pressure_shift(2, Potential(), LambdaSpec::whole(), 1, 16, 1e-6);
  EXPECT_EQ(est.method, PressureMethod::CylinderCaratheodory);
  EXPECT_EQ(est.columns.front(), "N");
}

TEST(Caratheodory, LocallyConstantTwoSymbolPotential) {
  // phi = w_0 * log 2 on the 2-shift: P = log(1 + 2)
  Potential phi = Potential::prefix_table(2, 1, {0.0, kLog2});
  EXPECT_NEAR(relative_pressure_shift(2, phi, LambdaSpec::whole(), 1, 24, 1e-9).value, kLog3, 1e-7);
}

TEST(Caratheodory, SupDecomposition) {
  auto rep = check_sup_decomposition(3, Potential(), {0, 1}, 1, 20, 1e-9);
  EXPECT_NEAR(rep.gap, std::log(1.5), 1e-6);
  EXPECT_TRUE(rep.holds);
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    auto r = check_sup_decomposition(3, random_prefix(rng, 3, 1, 1.0), {0, 2}, 1, 16, 1e-9);
    EXPECT_TRUE(r.holds) << r.gap;
  }
}

TEST(Caratheodory, ConstantInvariance) {
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    Potential phi = random_prefix(rng, 2, 2, 0.7);
    double c = rng.uniform(-1, 1);
    double a = relative_pressure_shift(2, phi, LambdaSpec::whole(), 1, 16, 1e-9).value;
    double b = relative_pressure_shift(2, phi.plus(c), LambdaSpec::whole(), 1, 16, 1e-9).value;
    EXPECT_NEAR(b - a, c, 4e-9);
  }
}

TEST(Caratheodory, BoundedBirkhoffSumsShiftByAtMostBetaOverDepth) {
  const std::vector<double> g{0.4, -0.3, 0.9, -0.6};
  Potential phi = shift_coboundary(2, 2, g);
  const double beta = 2 * 0.9;
  const double tol = 1e-10;
  double prev_excess = INFINITY;
  for (int n_max : {8, 16, 32}) {
    double p0 = relative_pressure_shift(2, Potential(), LambdaSpec::whole(), 1, n_max, tol).value;
    double p = relative_pressure_shift(2, phi, LambdaSpec::whole(), 1, n_max, tol).value;
    double excess = p - p0;
    EXPECT_LE(excess, beta / n_max + 2 * tol) << "n_max=" << n_max;
    EXPECT_LT(excess, prev_excess);
    prev_excess = excess;
  }
}

TEST(Caratheodory, Contracts) {
  EXPECT_THROW(caratheodory_m(1, Potential(), LambdaSpec::whole(), 1, 0.5, 10), ContractError);
  EXPECT_THROW(caratheodory_m(2, Potential(), LambdaSpec::sub_alphabet({2}), 1, 0.5, 10), ContractError);
  EXPECT_THROW(caratheodory_m(2, Potential(), LambdaSpec::whole(), 5, 0.5, 4), ContractError);
}

TEST(Hyperbolicity, TimesTwoHasNoHcSide) {
  auto m = MapSystem::circle_times_d(2);
  auto cls = classify(m, uniform_grid(m, 4096), 0.6, 50, 0.5);
  auto rep = hyperbolicity_report(m, Potential(), cls, {{2, 3, 4}, {0.05}});
  EXPECT_EQ(rep.hc_count, 0u);
  EXPECT_FALSE(rep.hc_side.has_value());
  ASSERT_TRUE(rep.h_side.has_value());
  EXPECT_EQ(rep.h_side->note.rfind("HEURISTIC; ", 0), 0u);
  EXPECT_FALSE(rep.gap.has_value());
  EXPECT_NEAR(rep.h_side->value, kLog2, 0.1);
}

TEST(Hyperbolicity, VianaHSideNearLogDegree) {
  auto m = MapSystem::viana(16, misiurewicz_a0(), 0.01);
  auto cls = classify(m, uniform_grid(m, 1 << 14, 16), 0.9, 60, 0.05);
  auto rep = hyperbolicity_report(m, Potential(), cls, {{1, 2}, {0.05}});
  ASSERT_TRUE(rep.h_side.has_value());
  EXPECT_GE(rep.h_side->value, 0.9 * std::log(16.0)) << rep.h_side->note;
}
