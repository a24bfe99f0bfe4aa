#pragma once

// Synthetic three-cosine ensembles for the phase-coupling benchmark.
//
// Each realization is
//   f(t) = A cos(2 pi ka t / n + ta) + A cos(2 pi kb t / n + tb)
//        + A cos(2 pi kg t / n + tg) + noise(t)
// where ta, tb are fresh uniform phases per realization and tg is either
// drawn independently (uncoupled) or fixed to ta + tb (coupled).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bispectral/spectral.hpp"

namespace bispectral {

enum class Coupling { independent, coupled };

std::string_view to_string(Coupling c) noexcept;
/// Accepts "independent"/"uncoupled" and "coupled".
Coupling parse_coupling(std::string_view name);

struct SynthParams {
  std::size_t n = 256;
  std::size_t m = 64;
  int k_alpha = 5;
  int k_beta = 9;
  /// Unset: kg = ka + kb. Set: the given bin is used as is.
  std::optional<int> k_gamma_explicit;
  Coupling coupling = Coupling::coupled;
  double amplitude = 1.0;
  double noise_amplitude = 0.05;
  std::uint64_t seed = 42;

  int k_gamma() const noexcept { return k_gamma_explicit.value_or(k_alpha + k_beta); }

  /// Throws bispectral::Error naming the first violated constraint.
  void validate() const;
};

struct PhaseTriple {
  double alpha;
  double beta;
  double gamma;
};

struct Ensemble {
  std::vector<TimeSeries> realizations;
  std::optional<SynthParams> params;  // absent for ingested data
  std::vector<PhaseTriple> phases;    // one per realization, or empty

  std::size_t length() const noexcept {
    return realizations.empty() ? 0 : realizations.front().size();
  }
};

/// Seeded generation. The phase draws of realization r depend only on
/// (seed, r); all three phases are always drawn, so coupled and uncoupled
/// ensembles with the same seed share their alpha and beta phases.
Ensemble generate(const SynthParams& params);

/// Builds the ensemble from caller-chosen phases (one triple per realization,
/// used verbatim). params.m is ignored in favour of phases.size(). Noise is
/// applied as in generate().
Ensemble generate_with_phases(const SynthParams& params, std::span<const PhaseTriple> phases);

/// Adds i.i.d. noise uniform on [-a, a] to every sample. The input is not
/// modified. a == 0 returns an exact copy.
Ensemble add_noise(const Ensemble& ensemble, double noise_amplitude, std::uint64_t seed);

}  // namespace bispectral
