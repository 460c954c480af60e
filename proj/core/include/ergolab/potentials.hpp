#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ergolab/hyperbolic.hpp"
#include "ergolab/maps.hpp"

namespace ergolab {

struct ConstantPotential {
  double c = 0.0;
};

enum class AnalyticFamily {
  CosTheta,  // t cos(2 pi theta) on the circle or the cylinder
  LinearX,   // t x on the interval or the cylinder
};

struct AnalyticPotential {
  AnalyticFamily family = AnalyticFamily::CosTheta;
  double t = 0.0;
};

/// Potential on a full shift depending on the first `prefix` symbols:
/// value = values[w_0 k^{p-1} + ... + w_{p-1}].
struct PrefixTable {
  int alphabet = 2;
  int prefix = 1;
  std::vector<double> values;

  double at(const std::uint8_t* word) const;
};

/// B: a single interval (circle or interval maps) or an angular interval times
/// an x-interval (cylinder). On the cylinder theta_lo = 0, theta_hi = 1 is the
/// whole circle.
struct BumpRegion {
  bool cylinder = false;
  double lo = 0.0;  // interval, or x-range on the cylinder
  double hi = 0.0;
  double theta_lo = 0.0;
  double theta_hi = 1.0;

  static BumpRegion interval(double lo, double hi) { return {false, lo, hi, 0.0, 1.0}; }
  static BumpRegion band(double theta_lo, double theta_hi, double x_lo, double x_hi) {
    return {true, x_lo, x_hi, theta_lo, theta_hi};
  }
  bool full_circle() const { return theta_lo == 0.0 && theta_hi == 1.0; }
  bool contains(const PhasePoint& p) const;
};

enum class BumpShape { SineSquared, Tent };

/// phi_b on B: amplitude times a product of one-dimensional profiles that
/// vanish on the boundary (sin^2(pi u) or the Lipschitz tent 1-|2u-1|).
struct BumpProfile {
  BumpShape shape = BumpShape::SineSquared;
  double amplitude = 1.0;

  double value(const BumpRegion& region, const PhasePoint& p) const;
  double sup() const { return amplitude; }
};

/// One angular piece of V = f^{-1}(B) with the range of |x| it covers.
struct PreimagePiece {
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double abs_x_min = 0.0;
  double abs_x_max = 0.0;
};

struct BumpPairData {
  MapSystem map;
  BumpRegion region;
  BumpProfile profile;
  /// 1D: the intervals of V. Cylinder: angular pieces with their |x| envelope.
  std::vector<Interval> v_intervals;
  std::vector<PreimagePiece> v_pieces;
};

/// A real-valued function on phase space. Every variant carries an additive
/// offset so that phi + c keeps the structure of phi.
class Potential {
 public:
  using Kind = std::variant<ConstantPotential, AnalyticPotential, std::shared_ptr<const BumpPairData>, PrefixTable>;

  Potential() : kind_(ConstantPotential{0.0}) {}
  static Potential constant(double c) { return Potential(ConstantPotential{c}); }
  static Potential analytic(AnalyticFamily family, double t) { return Potential(AnalyticPotential{family, t}); }
  static Potential prefix_table(int alphabet, int prefix, std::vector<double> values);

  const Kind& kind() const { return kind_; }
  double offset() const { return offset_; }
  bool is_bump_pair() const { return std::holds_alternative<std::shared_ptr<const BumpPairData>>(kind_); }
  const BumpPairData& bump_pair() const { return *std::get<std::shared_ptr<const BumpPairData>>(kind_); }

  /// phi + c.
  Potential plus(double c) const;

  double evaluate(const PhasePoint& p) const;
  /// Same as evaluate(p) when `image` equals step(map, p); avoids recomputing f(p).
  double evaluate_with_image(const PhasePoint& p, const PhasePoint& image) const;

  /// Upper bound on sup |phi| over the phase space, when one is known.
  std::optional<double> sup_abs(const MapSystem& map) const;

  std::string id() const;

 private:
  explicit Potential(Kind kind) : kind_(std::move(kind)) {}
  friend Potential make_bump_pair(const MapSystem&, const BumpRegion&, const BumpProfile&);

  Kind kind_;
  double offset_ = 0.0;
};

/// Validates B and phi_b, caches V = f^{-1}(B) and builds the potential that is
/// phi_b on B, -phi_b(f(x)) on V and 0 elsewhere. Throws ContractError with
/// "regions collide" when V meets B and "preimage touches critical set" when V
/// meets C.
Potential make_bump_pair(const MapSystem& map, const BumpRegion& region, const BumpProfile& profile = {});

/// Symbolic bump pair on the k-shift: g depends on the first p symbols and the
/// result is g - g o sigma, a prefix-(p+1) table with S_n = g - g o sigma^n.
Potential shift_coboundary(int k, int p, const std::vector<double>& g);

/// S_n phi(x) = sum_{i<n} phi(f^i x).
double birkhoff(const Potential& phi, const Orbit& orbit, std::size_t n);

struct BallSampler {
  std::size_t resolution = 1024;
  std::uint64_t seed = 0;
};

struct SupEstimate {
  double value = 0.0;
  std::size_t samples = 0;
  bool exact = false;
};

/// Sampled R_{n,delta} phi(x) = sup of S_n phi over the dynamical ball. Exact on
/// shifts (the ball is a cylinder); nested grids on 1D maps so refining never
/// lowers the value; rejection sampling inside a box on Viana maps.
SupEstimate sup_over_ball(const Potential& phi, const MapSystem& map, const PhasePoint& x, int n, double delta,
                          const BallSampler& sampler = {});

struct BirkhoffReport {
  std::string potential_id;
  std::string map_id;
  std::vector<PhasePoint> seeds;
  std::size_t horizon = 0;
  std::vector<double> max_abs;  // per seed, NaN when excluded
  std::size_t excluded = 0;
  double global_max = 0.0;
  std::optional<double> bound;  // sup phi_b for bump pairs
  double tolerance = 1e-9;
  bool passed = false;
};

BirkhoffReport verify_bounded(const Potential& phi, const MapSystem& map, std::size_t seeds, std::size_t horizon,
                              std::uint64_t seed, double tolerance = 1e-9);

/// CSV with header seed,max_abs_Sn.
std::string birkhoff_report_csv(const BirkhoffReport& report);

}  // namespace ergolab
