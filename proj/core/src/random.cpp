#include "ergolab/random.hpp"

namespace ergolab {

std::vector<PhasePoint> sample_phase_points(const MapSystem& map, std::size_t count, std::uint64_t seed,
                                            std::size_t word_length) {
  std::vector<PhasePoint> out;
  out.reserve(count);
  const double beta = map.interval_radius();
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, i));
    switch (map.kind()) {
      case MapKind::CircleTimesD: out.emplace_back(CircleAngle(rng.uniform())); break;
      case MapKind::Quadratic: out.emplace_back(IntervalCoord(rng.uniform(-beta, beta))); break;
      case MapKind::Viana: {
        double theta = rng.uniform();
        out.emplace_back(CylinderPoint(theta, rng.uniform(-beta, beta)));
        break;
      }
      case MapKind::FullShift: {
        const int k = map.shift().alphabet;
        std::vector<std::uint8_t> word(word_length);
        for (auto& s : word) s = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(k)));
        out.emplace_back(SymbolWord(k, std::move(word)));
        break;
      }
    }
  }
  return out;
}

}  // namespace ergolab
