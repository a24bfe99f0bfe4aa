#pragma once

#include <cstdint>
#include <random>

namespace bispectral {

/// splitmix64 finalizer. Used to derive independent stream seeds from a
/// (seed, index) pair so that per-realization draws do not depend on the
/// order in which realizations are generated.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic stream: std::mt19937_64 seeded with mix_seed(seed, index).
/// Uniform doubles are built from the top 53 bits, so the output is
/// identical across standard library implementations.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index) : engine_(mix_seed(seed, index)) {}

  /// Uniform on [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 engine_;
};

// Stream-family tags, so phase draws, noise and surrogates never share a stream.
inline constexpr std::uint64_t kPhaseStream = 0x7068617365ULL;
inline constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
inline constexpr std::uint64_t kSurrogateStream = 0x7375727267ULL;

}  // namespace bispectral
