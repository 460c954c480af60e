#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergolab/hyperbolic.hpp"
#include "ergolab/maps.hpp"
#include "ergolab/potentials.hpp"

namespace ergolab {

/// log(sum_i exp(v_i)) accumulated in index order; -inf for an empty span.
double log_sum_exp(std::span<const double> values);

struct SeparatedSet {
  std::string map_id;
  int n = 0;
  double eps = 0.0;
  std::vector<PhasePoint> points;
  std::size_t candidates = 0;
  std::size_t skipped = 0;  // candidates whose orbit left the domain
  std::string grid;
};

/// Uniform candidate grid: resolution points on the circle or the interval; on
/// the cylinder resolution angles times x_resolution heights (0 = resolution).
std::vector<PhasePoint> uniform_grid(const MapSystem& map, std::size_t resolution, std::size_t x_resolution = 0);

/// Greedy (n, eps)-separated subset of the uniform grid in the metric
/// d_n(p, q) = max_{0<=i<=n} d(f^i p, f^i q), scanned in grid index order.
SeparatedSet build_separated(const MapSystem& map, int n, double eps, std::size_t resolution,
                             std::size_t x_resolution = 0);

/// Same greedy scan over an explicit candidate list.
SeparatedSet build_separated_from(const MapSystem& map, int n, double eps, const std::vector<PhasePoint>& candidates,
                                  std::string grid_note = "explicit");

/// log Z_n(phi, eps) = log sum_{x in E} exp(S_n phi(x)).
double log_partition(const MapSystem& map, const Potential& phi, const SeparatedSet& set);

enum class PressureMethod { SeparatedSets, CylinderCaratheodory, Ulam };

std::string to_string(PressureMethod method);

/// A pressure value with the table it was extrapolated from.
struct PressureEstimate {
  double value = 0.0;
  PressureMethod method = PressureMethod::SeparatedSets;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string note;
};

std::string pressure_table_csv(const PressureEstimate& estimate);
/// method,value,params_hash
std::string pressure_summary_line(const PressureEstimate& estimate);

/// Least-squares slope of ys against xs.
double least_squares_slope(std::span<const double> xs, std::span<const double> ys);

/// Separated-set pressure. The value is the least-squares slope of log Z_n
/// against n over the three largest n at the smallest eps.
PressureEstimate pressure_separated(const MapSystem& map, const Potential& phi, const std::vector<int>& n_list,
                                    const std::vector<double>& eps_list, std::size_t resolution,
                                    std::size_t x_resolution = 0);

/// Same estimator over prebuilt sets (indexed [eps][n]); keeps sets fixed
/// across potentials.
PressureEstimate pressure_on_sets(const MapSystem& map, const Potential& phi,
                                  const std::vector<std::vector<SeparatedSet>>& sets);

/// Subset Lambda of the phase space that a relative pressure is taken over.
struct LambdaSpec {
  enum class Kind { WholeSpace, SubAlphabet, EmpiricalH, EmpiricalHc };

  Kind kind = Kind::WholeSpace;
  std::vector<int> symbols;                              // SubAlphabet
  std::shared_ptr<const HClassification> classification;  // EmpiricalH / EmpiricalHc

  static LambdaSpec whole() { return {}; }
  static LambdaSpec sub_alphabet(std::vector<int> s);
  static LambdaSpec empirical(std::shared_ptr<const HClassification> c, HLabel label);
};

/// Infimum over covers of Lambda by cylinders of length in [N, n_max] of
/// sum exp(-gamma n + R_n phi), computed by dynamic programming over the
/// prefix tree. Only the last (prefix-1) symbols of a node matter, so the
/// state space has at most k^(p-1) entries per depth.
double caratheodory_log_m(int k, const Potential& phi, const LambdaSpec& lambda, int N, double gamma, int n_max);
double caratheodory_m(int k, const Potential& phi, const LambdaSpec& lambda, int N, double gamma, int n_max);

/// Bisection for the gamma at which m drops below 1 at depth n_max.
PressureEstimate relative_pressure_shift(int k, const Potential& phi, const LambdaSpec& lambda, int N, int n_max,
                                         double gamma_tol);

struct SupDecompositionReport {
  double p_whole = 0.0;
  double p_lambda = 0.0;
  double gap = 0.0;
  bool holds = false;
};

SupDecompositionReport check_sup_decomposition(int k, const Potential& phi, const std::vector<int>& sub_alphabet,
                                               int N, int n_max, double gamma_tol);

struct SeparatedParams {
  std::vector<int> n_list;
  std::vector<double> eps_list;
};

struct HyperbolicityReport {
  std::optional<PressureEstimate> h_side;
  std::optional<PressureEstimate> hc_side;
  std::size_t h_count = 0;
  std::size_t hc_count = 0;
  std::optional<double> gap;  // h_side - hc_side
  std::string label = "HEURISTIC";
};

/// Separated-set pressure restricted to the empirically-H and empirically-Hc
/// points of the classification. A heuristic: H^c is typically Lebesgue-null.
HyperbolicityReport hyperbolicity_report(const MapSystem& map, const Potential& phi,
                                         const HClassification& classification, const SeparatedParams& params);

}  // namespace ergolab
