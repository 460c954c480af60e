#include "ergolab/phase.hpp"

#include <algorithm>
#include <sstream>

namespace ergolab {

SymbolWord::SymbolWord(int k, std::vector<std::uint8_t> word) : alphabet(k), symbols(std::move(word)) {
  if (k < 2) throw ContractError("alphabet size must be >= 2");
  if (symbols.empty()) throw ContractError("symbol word must be nonempty");
  for (auto s : symbols) {
    if (s >= k) throw ContractError("symbol " + std::to_string(s) + " outside alphabet of size " + std::to_string(k));
  }
}

std::string describe(const PhasePoint& p) {
  std::ostringstream out;
  out.precision(17);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CircleAngle>) {
          out << "theta=" << v.theta;
        } else if constexpr (std::is_same_v<T, IntervalCoord>) {
          out << "x=" << v.x;
        } else if constexpr (std::is_same_v<T, CylinderPoint>) {
          out << "(theta=" << v.theta << ", x=" << v.x << ")";
        } else {
          out << "word=";
          for (auto s : v.symbols) out << static_cast<int>(s);
        }
      },
      p);
  return out.str();
}

double word_distance(const SymbolWord& a, const SymbolWord& b) {
  std::size_t len = std::min(a.symbols.size(), b.symbols.size());
  std::size_t m = 0;
  while (m < len && a.symbols[m] == b.symbols[m]) ++m;
  if (m == a.symbols.size() && m == b.symbols.size()) return 0.0;
  return std::ldexp(1.0, -static_cast<int>(m));
}

double distance(Metric metric, const PhasePoint& p, const PhasePoint& q) {
  switch (metric) {
    case Metric::CircleArc: {
      auto* a = std::get_if<CircleAngle>(&p);
      auto* b = std::get_if<CircleAngle>(&q);
      if (!a || !b) throw ContractError("CircleArc metric needs two circle angles");
      return circle_arc(a->theta, b->theta);
    }
    case Metric::Euclidean1D: {
      auto* a = std::get_if<IntervalCoord>(&p);
      auto* b = std::get_if<IntervalCoord>(&q);
      if (!a || !b) throw ContractError("Euclidean1D metric needs two interval coordinates");
      return std::abs(a->x - b->x);
    }
    case Metric::CylinderMax: {
      auto* a = std::get_if<CylinderPoint>(&p);
      auto* b = std::get_if<CylinderPoint>(&q);
      if (!a || !b) throw ContractError("CylinderMax metric needs two cylinder points");
      return std::max(circle_arc(a->theta, b->theta), std::abs(a->x - b->x));
    }
    case Metric::WordMetric: {
      auto* a = std::get_if<SymbolWord>(&p);
      auto* b = std::get_if<SymbolWord>(&q);
      if (!a || !b) throw ContractError("WordMetric needs two symbol words");
      return word_distance(*a, *b);
    }
  }
  throw ContractError("unknown metric");
}

}  // namespace ergolab
