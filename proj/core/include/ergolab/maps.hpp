#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ergolab/phase.hpp"

namespace ergolab {

enum class MapKind { CircleTimesD, Quadratic, Viana, FullShift };

std::string to_string(MapKind kind);

/// The fibre-forcing function b of a Viana map. Either b(theta) = sin(2 pi theta)
/// or a periodic table sampled on a uniform theta grid, linearly interpolated.
class ForcingFunction {
 public:
  ForcingFunction() = default;
  static ForcingFunction sine() { return {}; }
  static ForcingFunction tabulated(std::vector<double> samples);

  double value(double theta) const;
  double derivative(double theta) const;
  bool is_sine() const { return table_.empty(); }
  const std::vector<double>& table() const { return table_; }

 private:
  std::vector<double> table_;
};

struct CircleTimesDParams {
  int degree = 2;
};

struct QuadraticParams {
  double a0 = 2.0;
};

struct VianaParams {
  int degree = 16;
  double a0 = 1.5436890126920764;
  double alpha = 0.01;
  ForcingFunction forcing;
};

struct FullShiftParams {
  int alphabet = 2;
};

/// Number of theta samples used to certify the invariant interval of a Viana map.
inline constexpr int kVianaCertificationGrid = 1 << 14;

/// A dynamical system with its phase space, derivative data and critical set.
class MapSystem {
 public:
  static MapSystem circle_times_d(int degree);
  static MapSystem quadratic(double a0);
  static MapSystem viana(int degree, double a0, double alpha, ForcingFunction forcing = ForcingFunction::sine());
  static MapSystem full_shift(int alphabet);

  MapKind kind() const { return kind_; }
  const CircleTimesDParams& circle() const { return std::get<CircleTimesDParams>(params_); }
  const QuadraticParams& quadratic_params() const { return std::get<QuadraticParams>(params_); }
  const VianaParams& viana_params() const { return std::get<VianaParams>(params_); }
  const FullShiftParams& shift() const { return std::get<FullShiftParams>(params_); }

  /// Half-width beta of the phase-space interval [-beta, beta] (Quadratic, Viana).
  double interval_radius() const { return radius_; }
  bool is_one_dimensional() const { return kind_ == MapKind::CircleTimesD || kind_ == MapKind::Quadratic; }
  bool has_critical_set() const { return kind_ == MapKind::Quadratic || kind_ == MapKind::Viana; }
  Metric metric() const;

  /// Stable textual identifier embedding every parameter.
  std::string id() const;

  /// a(theta) = a0 + alpha b(theta) for Viana maps.
  double fibre_parameter(double theta) const;

 private:
  MapSystem(MapKind kind, std::variant<CircleTimesDParams, QuadraticParams, VianaParams, FullShiftParams> params,
            double radius)
      : kind_(kind), params_(std::move(params)), radius_(radius) {}

  MapKind kind_;
  std::variant<CircleTimesDParams, QuadraticParams, VianaParams, FullShiftParams> params_;
  double radius_ = 0.0;
};

/// Smallest beta on a 1e-6 lattice below 2 for which q(theta, [-beta, beta]) lies
/// in (-beta, beta) at every theta of the certification grid. Throws when no such
/// beta exists.
double viana_invariant_radius(double a0, double alpha, const ForcingFunction& forcing);

/// The Misiurewicz parameter a* in (1,2): the critical orbit 0 -> a -> a - a^2
/// lands after three steps on the positive fixed point of Q(x) = a - x^2.
inline constexpr double misiurewicz_a0() { return 1.5436890126920764; }

/// Positive fixed point of x -> a - x^2.
double quadratic_positive_fixed_point(double a);

PhasePoint step(const MapSystem& map, const PhasePoint& p);

/// Operator norm of Df(p)^{-1}; +inf on the critical set.
double inv_deriv_norm(const MapSystem& map, const PhasePoint& p);

/// |det Df(p)|, the local volume expansion.
double jacobian(const MapSystem& map, const PhasePoint& p);

/// Distance to the critical set; +inf when the critical set is empty.
double critical_distance(const MapSystem& map, const PhasePoint& p);

/// dist(p, C) when closer than delta, otherwise 1.
double dist_delta(const MapSystem& map, const PhasePoint& p, double delta);

/// True when p lies in the (closed) phase space of the map.
bool in_domain(const MapSystem& map, const PhasePoint& p);

struct Preimage {
  PhasePoint point;
  /// Branch symbols, first entry is the branch used at step 0. Circle maps use
  /// floor(d * theta); the quadratic family uses -1 (x<0), 0 (x=0), +1 (x>0).
  std::vector<int> itinerary;
};

/// Every y with f^n(y) = p, sorted by coordinate.
std::vector<Preimage> inverse_branches(const MapSystem& map, const PhasePoint& p, int n);

struct Orbit {
  std::string map_id;
  PhasePoint initial;
  std::size_t length = 0;
  std::vector<PhasePoint> points;
  std::vector<double> inv_norms;
  std::vector<double> crit_dists;
};

Orbit orbit(const MapSystem& map, const PhasePoint& p, std::size_t n);

/// CSV with header step,theta,x,inv_deriv_norm,crit_dist. The last row carries
/// the final point with empty derivative columns.
std::string orbit_csv(const Orbit& orbit);

}  // namespace ergolab
