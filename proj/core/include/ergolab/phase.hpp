#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ergolab/error.hpp"

namespace ergolab {

/// Reduces a real number into [0,1) as value - floor(value).
inline double wrap_unit(double value) {
  double r = value - std::floor(value);
  // -tiny - floor(-tiny) rounds to exactly 1.0
  return r >= 1.0 ? 0.0 : r;
}

struct CircleAngle {
  double theta = 0.0;

  CircleAngle() = default;
  explicit CircleAngle(double t) : theta(wrap_unit(t)) {}
};

struct IntervalCoord {
  double x = 0.0;

  IntervalCoord() = default;
  explicit IntervalCoord(double v) : x(v) {}
};

struct CylinderPoint {
  double theta = 0.0;
  double x = 0.0;

  CylinderPoint() = default;
  CylinderPoint(double t, double v) : theta(wrap_unit(t)), x(v) {}
};

/// Finite word over {0, ..., alphabet-1}; index 0 is the present symbol.
struct SymbolWord {
  int alphabet = 2;
  std::vector<std::uint8_t> symbols;

  SymbolWord() = default;
  SymbolWord(int k, std::vector<std::uint8_t> word);
};

using PhasePoint = std::variant<CircleAngle, IntervalCoord, CylinderPoint, SymbolWord>;

std::string describe(const PhasePoint& p);

enum class Metric { CircleArc, Euclidean1D, CylinderMax, WordMetric };

/// min(|a-b|, 1-|a-b|), evaluated so that small wrapped distances keep full
/// relative precision.
inline double circle_arc(double a, double b) {
  double lo = a < b ? a : b;
  double hi = a < b ? b : a;
  double direct = hi - lo;
  double wrapped = (1.0 - hi) + lo;
  return direct < wrapped ? direct : wrapped;
}

/// 2^-m with m the length of the longest common prefix.
double word_distance(const SymbolWord& a, const SymbolWord& b);

double distance(Metric metric, const PhasePoint& p, const PhasePoint& q);

}  // namespace ergolab
