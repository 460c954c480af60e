#include <gtest/gtest.h>

#include <cmath>

#include "ergolab/transfer.hpp"

using namespace ergolab;

namespace {

// Collocation oracle for the Ruelle operator of x2 with 0.1 cos(2 pi theta).
constexpr double kCosPressure = 0.6957768143676035;

}  // namespace

TEST(Grid, LocateAndCenters) {
  Grid g = Grid::for_map(MapSystem::circle_times_d(2), 8);
  EXPECT_EQ(g.cells(), 8u);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.125);
  EXPECT_DOUBLE_EQ(std::get<CircleAngle>(g.center(3)).theta, 0.4375);
  EXPECT_EQ(g.locate(CircleAngle(0.99)), 7u);
  Grid q = Grid::for_map(MapSystem::quadratic(2.0), 4);
  EXPECT_DOUBLE_EQ(q.lo, -2.0);
  EXPECT_EQ(q.locate(IntervalCoord(-2.0)), 0u);
  EXPECT_EQ(q.locate(IntervalCoord(2.0)), 3u);
  EXPECT_FALSE(q.locate(IntervalCoord(2.5)).has_value());
  Grid v = Grid::for_map(MapSystem::viana(16, misiurewicz_a0(), 0.01), 8, 4);
  EXPECT_TRUE(v.two_d());
  EXPECT_EQ(v.cells(), 32u);
  EXPECT_EQ(v.locate(CylinderPoint(0.2, v.x_lo + 0.6 * v.x_width)), 1u * 4 + 2);
}

TEST(Ulam, TimesTwoSmallMatrix) {
  auto m = MapSystem::circle_times_d(2);
  auto op = build_ulam(m, Grid::for_map(m, 8), Potential());
  for (std::size_t j = 0; j < 8; ++j) {
    for (std::size_t i = 0; i < 8; ++i) {
      bool hit = i == (2 * j) % 8 || i == (2 * j + 1) % 8;
      EXPECT_DOUBLE_EQ(op.at(i, j), hit ? 1.0 : 0.0) << i << "," << j;
    }
  }
  for (double s : op.column_sums()) EXPECT_DOUBLE_EQ(s, 2.0);
}

TEST(Ulam, ColumnSumsEqualDegree) {
  for (int d : {2, 3, 5}) {
    auto m = MapSystem::circle_times_d(d);
    auto op = build_ulam(m, Grid::for_map(m, 1000), Potential());
    for (double s : op.column_sums()) ASSERT_NEAR(s, d, 1e-12);
  }
}

TEST(Ulam, QuadraticFourCells) {
  auto m = MapSystem::quadratic(2.0);
  auto op = build_ulam(m, Grid::for_map(m, 4), Potential());
  const double expect[4][4] = {{1, 0, 0, 1}, {1, 0, 0, 1}, {1, 0, 0, 1}, {0, 1, 1, 0}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(op.at(i, j), expect[i][j], 1e-12) << i << "," << j;
}

TEST(Ulam, ConstantPotentialScalesExactly) {
  auto m = MapSystem::circle_times_d(3);
  auto g = Grid::for_map(m, 64);
  auto a = build_ulam(m, g, Potential());
  auto b = build_ulam(m, g, Potential::constant(0.4));
  ASSERT_EQ(a.val.size(), b.val.size());
  for (std::size_t k = 0; k < a.val.size(); ++k) EXPECT_DOUBLE_EQ(b.val[k], std::exp(0.4) * a.val[k]);
}

TEST(Ulam, ExactBranchRejectsCylinder) {
  auto v = MapSystem::viana(16, misiurewicz_a0(), 0.01);
  EXPECT_THROW(build_ulam(v, Grid::for_map(v, 8, 8), Potential()), ContractError);
}

TEST(PowerIteration, TimesDEigenvalue) {
  for (int d : {2, 3}) {
    auto m = MapSystem::circle_times_d(d);
    auto sp = power_iterate(build_ulam(m, Grid::for_map(m, 4096), Potential()), 1e-13, 1000);
    EXPECT_TRUE(sp.converged);
    EXPECT_NEAR(sp.lambda, d, 1e-12);
    for (double v : sp.vector) ASSERT_NEAR(v, 1.0 / 4096, 1e-8 / 4096);
  }
}

TEST(PowerIteration, QuadraticUniformEigenvector) {
  auto m = MapSystem::quadratic(2.0);
  auto sp = power_iterate(build_ulam(m, Grid::for_map(m, 1024), Potential()), 1e-13, 1000);
  EXPECT_NEAR(sp.lambda, 2.0, 1e-12);
  EXPECT_LT(sp.residual, 1e-10);
}

TEST(PressureUlam, CosinePotentialMatchesCollocation) {
  auto m = MapSystem::circle_times_d(2);
  Potential phi = Potential::analytic(AnalyticFamily::CosTheta, 0.1);
  auto est = pressure_ulam(m, phi, Grid::for_map(m, 4096), UlamMode::exact(), 1e-13);
  EXPECT_NEAR(est.value, kCosPressure, 2e-3);
  auto sep = pressure_separated(m, phi, {2, 4, 6, 8}, {0.01}, 1 << 20);
  EXPECT_NEAR(est.value, sep.value, 0.02 * est.value);
  EXPECT_EQ(est.method, PressureMethod::Ulam);
}

TEST(PressureUlam, LogDegreePlusConstant) {
  auto m = MapSystem::circle_times_d(3);
  auto est = pressure_ulam(m, Potential::constant(-0.3), Grid::for_map(m, 512), UlamMode::exact(), 1e-13);
  EXPECT_NEAR(est.value, std::log(3.0) - 0.3, 1e-12);
}

TEST(PressureUlam, RefinementStable) {
  auto m = MapSystem::circle_times_d(2);
  Potential phi = Potential::analytic(AnalyticFamily::CosTheta, 0.5);
  double a = pressure_ulam(m, phi, Grid::for_map(m, 1024), UlamMode::exact(), 1e-13).value;
  double b = pressure_ulam(m, phi, Grid::for_map(m, 2048), UlamMode::exact(), 1e-13).value;
  double c = pressure_ulam(m, phi, Grid::for_map(m, 4096), UlamMode::exact(), 1e-13).value;
  EXPECT_LT(std::abs(c - b), std::abs(b - a) + 1e-12);
  EXPECT_LT(std::abs(c - b), 1e-3);
}

TEST(MonteCarlo, DeterministicAndCloseToExact) {
  auto m = MapSystem::circle_times_d(2);
  auto g = Grid::for_map(m, 256);
  auto a = build_ulam(m, g, Potential(), UlamMode::monte_carlo(3, 64));
  auto b = build_ulam(m, g, Potential(), UlamMode::monte_carlo(3, 64));
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.col, b.col);
  EXPECT_EQ(ulam_triplets(a), ulam_triplets(b));
  for (double s : a.column_sums()) ASSERT_NEAR(s, 2.0, 1e-12);
  auto c = build_ulam(m, g, Potential(), UlamMode::monte_carlo(4, 64));
  EXPECT_NE(ulam_triplets(a), ulam_triplets(c));
}

TEST(Density, TimesTwoUniform) {
  auto m = MapSystem::circle_times_d(2);
  auto t = mme_density(m, Grid::for_map(m, 1024), UlamMode::exact(), 1e-13);
  EXPECT_NEAR(t.total_mass(), 1.0, 1e-12);
  for (double d : t.density) ASSERT_NEAR(d, 1.0, 1e-8);
  EXPECT_EQ(density_csv(t).rfind("cell_index,theta,density\n", 0), 0u);
}

TEST(Density, VianaMonteCarloNormalised) {
  auto v = MapSystem::viana(16, misiurewicz_a0(), 0.01);
  auto t = mme_density(v, Grid::for_map(v, 256, 256), UlamMode::monte_carlo(9, 64), 1e-10, 5000);
  EXPECT_NEAR(t.total_mass(), 1.0, 1e-12);
  for (double d : t.density) ASSERT_GE(d, 0.0);
  EXPECT_EQ(density_csv(t).rfind("cell_index,theta,x,density\n", 0), 0u);
}

TEST(Triplets, HeaderAndRows) {
  auto m = MapSystem::circle_times_d(2);
  std::string s = ulam_triplets(build_ulam(m, Grid::for_map(m, 4), Potential()));
  EXPECT_EQ(s.rfind("# map=", 0), 0u);
  EXPECT_NE(s.find("\n0 0 1\n"), std::string::npos);
}
