#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/maps.hpp"

namespace ergolab {

/// An interval of the line, or an arc of the circle written in lifted
/// coordinates around its base point (lo may be negative, hi may exceed 1).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool full = false;  // the whole circle

  double length() const { return hi - lo; }
  bool contains(double v) const { return full || (lo < v && v < hi); }
  bool contains(const Interval& other, double tol = 0.0) const {
    if (full) return true;
    if (other.full) return false;
    return lo <= other.lo + tol && other.hi <= hi + tol;
  }
};

/// Times n <= horizon at which the derivative (Pliss) criterion holds.
struct HyperbolicTimeRecord {
  std::string map_id;
  double sigma = 0.5;
  /// Last time that could be evaluated: the orbit length, or the step at which
  /// an infinite inverse-derivative norm truncated the record.
  std::size_t horizon = 0;
  std::vector<std::size_t> times;
  bool truncated = false;
};

/// n is recorded when prod_{j=n-k}^{n-1} inv_norm[j] <= sigma^k for all 1 <= k <= n.
HyperbolicTimeRecord detect_pliss(const Orbit& orbit, double sigma);

/// #{hyperbolic times <= n} / n.
double frequency(const HyperbolicTimeRecord& record, std::size_t n);

/// freq(1), ..., freq(horizon).
std::vector<double> frequency_table(const HyperbolicTimeRecord& record);

/// Keeps the times <= n and sets the horizon to n.
HyperbolicTimeRecord truncate(const HyperbolicTimeRecord& record, std::size_t n);

struct PreBall {
  PhasePoint center;
  int n = 0;
  double delta = 0.0;
  Interval interval;
  std::vector<int> itinerary;
};

/// Connected component of f^{-n}(B_delta(f^n x)) containing x, pulled back along
/// the branch itinerary of x. Throws ComputationError when a pullback folds over
/// the critical point.
PreBall preball(const MapSystem& map, const PhasePoint& x, int n, double delta);

/// Connected component containing x of {y : d(f^i x, f^i y) < delta, 0 <= i <= n}.
Interval dynamical_ball_1d(const MapSystem& map, const PhasePoint& x, int n, double delta);

struct ContractionReport {
  bool passed = false;
  double worst_ratio = 0.0;
  std::size_t pairs_checked = 0;
  std::size_t degenerate_pairs = 0;
};

/// Samples pairs from the pre-ball of x (a box of radius delta sigma^n for
/// Viana maps) and checks d(f^i y, f^i z) <= sigma^{n-i} d(f^n y, f^n z) for
/// 0 <= i < n. Passes when the worst ratio is at most 1 + tolerance.
ContractionReport verify_metric_contraction(const MapSystem& map, const PhasePoint& x, int n, double sigma,
                                            double delta, std::size_t samples, std::uint64_t seed,
                                            double tolerance = 1e-9);

enum class HLabel { H, Hc };

struct HEntry {
  PhasePoint point;
  double frequency = 0.0;
  HLabel label = HLabel::Hc;
  bool flagged = false;  // escaped or hit the critical set; excluded from totals
  std::string note;
};

struct HClassification {
  double sigma = 0.0;
  std::size_t horizon = 0;
  double threshold = 0.0;
  std::vector<HEntry> entries;

  std::size_t count(HLabel label) const;
  std::size_t flagged() const;
  /// Share of unflagged entries labelled H.
  double h_fraction() const;
};

HClassification classify(const MapSystem& map, const std::vector<PhasePoint>& seeds, double sigma,
                         std::size_t horizon, double threshold);

struct SlowApproximation {
  double value = 0.0;
  bool critical_hit = false;
};

/// (1/n) sum_{i<n} -log dist_delta(f^i p, C).
SlowApproximation slow_approx_average(const Orbit& orbit, double delta);

std::string hyperbolic_times_csv(const HyperbolicTimeRecord& record);
/// Sidecar with header sigma,horizon,frequency.
std::string hyperbolic_summary_csv(const HyperbolicTimeRecord& record);
std::string classification_csv(const HClassification& classification);

}  // namespace ergolab
