#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ergolab/maps.hpp"

namespace ergolab {

/// SplitMix64 finaliser; derives independent stream seeds from (master, index).
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic uniform stream. std::uniform_real_distribution is not
/// portable across standard libraries, so the conversion is done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

/// Lebesgue-uniform initial conditions on the phase space of `map`; shift
/// points are uniform words of length `word_length`. Point i depends only on
/// (seed, i).
std::vector<PhasePoint> sample_phase_points(const MapSystem& map, std::size_t count, std::uint64_t seed,
                                            std::size_t word_length = 64);

}  // namespace ergolab
