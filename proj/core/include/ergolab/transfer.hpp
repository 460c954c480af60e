#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/maps.hpp"
#include "ergolab/potentials.hpp"
#include "ergolab/pressure.hpp"

namespace ergolab {

/// Equal cells over the circle or [-beta, beta]; on the cylinder m x m_x cells,
/// index = i_theta * m_x + i_x.
struct Grid {
  MapKind kind = MapKind::CircleTimesD;
  int m = 0;
  int m_x = 0;  // 0 for one-dimensional grids
  double lo = 0.0;
  double width = 1.0;  // extent of the first coordinate
  double x_lo = 0.0;
  double x_width = 0.0;

  static Grid for_map(const MapSystem& map, int m, int m_x = 0);

  bool two_d() const { return m_x > 0; }
  std::size_t cells() const { return static_cast<std::size_t>(m) * static_cast<std::size_t>(two_d() ? m_x : 1); }
  double cell_volume() const;
  PhasePoint center(std::size_t j) const;
  /// Cell containing p, or nothing when p is outside the grid.
  std::optional<std::size_t> locate(const PhasePoint& p) const;
  std::string describe() const;
};

struct UlamMode {
  enum class Kind { ExactBranch, MonteCarlo };

  Kind kind = Kind::ExactBranch;
  std::uint64_t seed = 0;
  std::size_t samples_per_cell = 64;

  static UlamMode exact() { return {}; }
  static UlamMode monte_carlo(std::uint64_t seed, std::size_t samples) { return {Kind::MonteCarlo, seed, samples}; }
  std::string describe() const;
};

/// Weighted Ulam matrix, row-compressed:
///   L[i][j] = exp(phi(c_j)) |f(c_j) cap c_i| / |c_i|
/// so that for phi = 0 and the x d map every column sums to d. Monte Carlo
/// replaces the image measure by sum |det Df(y)| / S over S stratified samples.
struct UlamOperator {
  Grid grid;
  std::string map_id;
  std::string potential_id;
  UlamMode mode;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t size() const { return grid.cells(); }
  double at(std::size_t i, std::size_t j) const;
  std::vector<double> column_sums() const;
  void apply(const std::vector<double>& v, std::vector<double>& out) const;
};

UlamOperator build_ulam(const MapSystem& map, const Grid& grid, const Potential& phi, const UlamMode& mode = {});

struct SpectralResult {
  double lambda = 0.0;
  std::vector<double> vector;  // sums to 1
  double residual = 0.0;       // ||L v - lambda v||_1
  std::size_t iterations = 0;
  bool converged = false;
};

/// v <- Lv / ||Lv||_1 from the uniform vector until successive lambdas differ by
/// less than tol.
SpectralResult power_iterate(const UlamOperator& op, double tol, std::size_t max_iter);

PressureEstimate pressure_ulam(const MapSystem& map, const Potential& phi, const Grid& grid, const UlamMode& mode,
                               double tol, std::size_t max_iter = 100000);

struct DensityTable {
  Grid grid;
  std::vector<double> density;  // per unit length (area on the cylinder)
  SpectralResult spectral;

  double total_mass() const;
};

DensityTable mme_density(const MapSystem& map, const Grid& grid, const UlamMode& mode, double tol,
                         std::size_t max_iter = 100000);

/// "row col value" lines after a commented header with grid, mode and seed.
std::string ulam_triplets(const UlamOperator& op);
/// cell_index,theta,density / cell_index,x,density / cell_index,theta,x,density.
std::string density_csv(const DensityTable& table);

}  // namespace ergolab
