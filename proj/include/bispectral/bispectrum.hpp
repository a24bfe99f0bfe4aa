#pragma once

// Bispectrum estimation over an ensemble of equal-length segments.
//
// For each cell (ka, kb) of the principal domain the estimator accumulates
//   acc  = sum_j F_j(ka) F_j(kb) conj(F_j(ka + kb))
//   p_ab = sum_j |F_j(ka) F_j(kb)|^2
//   p_g  = sum_j |F_j(ka + kb)|^2
// over segments j. The squared bicoherence |acc|^2 / (p_ab p_g) lies in
// [0, 1] by Cauchy-Schwarz; it is 1 when the biphase arg(F(ka)F(kb)F*(ka+kb))
// is identical across segments and decays like 1/m when it is random.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bispectral/spectral.hpp"

namespace bispectral {

struct Cell {
  std::size_t ka = 0;
  std::size_t kb = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Non-redundant region {1 <= kb <= ka, ka + kb <= n/2} of the bispectrum of
/// a real signal, stored row by row (ka ascending, kb ascending).
class PrincipalDomain {
 public:
  explicit PrincipalDomain(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return cells_.size(); }
  bool contains(std::size_t ka, std::size_t kb) const noexcept;
  /// Storage index of (ka, kb). Throws if the cell is outside the domain.
  std::size_t index(std::size_t ka, std::size_t kb) const;
  std::span<const Cell> cells() const noexcept { return cells_; }
  std::size_t max_ka() const noexcept { return n_ / 2 - 1; }
  std::size_t max_kb() const noexcept { return n_ / 4; }

 private:
  std::size_t n_;
  std::vector<std::size_t> row_offset_;  // indexed by ka
  std::vector<Cell> cells_;
};

class BispectrumEstimate {
 public:
  explicit BispectrumEstimate(std::size_t n);

  /// Adds one segment's spectrum. Length must match n().
  void accumulate(const Spectrum& spectrum);
  /// Adds another estimate over the same n (parallel reduction).
  void merge(const BispectrumEstimate& other);

  std::size_t n() const noexcept { return domain_.n(); }
  std::size_t m() const noexcept { return m_; }
  const PrincipalDomain& domain() const noexcept { return domain_; }

  std::span<const Complex> acc() const noexcept { return acc_; }
  std::span<const double> p_ab() const noexcept { return p_ab_; }
  std::span<const double> p_g() const noexcept { return p_g_; }

  Complex acc(std::size_t ka, std::size_t kb) const { return acc_[domain_.index(ka, kb)]; }
  /// acc / m: the averaged bispectrum.
  Complex mean(std::size_t ka, std::size_t kb) const {
    return acc(ka, kb) / static_cast<double>(m_);
  }

 private:
  PrincipalDomain domain_;
  std::size_t m_ = 0;
  std::vector<Complex> acc_;
  std::vector<double> p_ab_;
  std::vector<double> p_g_;
};

/// Accumulates the bispectrum over the given spectra. Throws on an empty
/// list or mismatched lengths.
BispectrumEstimate bispectrum(std::span<const Spectrum> spectra);

/// Transforms every segment with dft() and accumulates. Segment lengths must
/// agree and be a power of two.
BispectrumEstimate bispectrum(std::span<const TimeSeries> segments);

/// Full n x n accumulator sum_j F(a)F(b)F*((a+b) mod n), row-major. Debug
/// aid for checking the symmetries the principal domain relies on.
std::vector<Complex> bispectrum_full(std::span<const Spectrum> spectra);

struct BicoherenceMap {
  PrincipalDomain domain;
  std::vector<double> b2;
  std::vector<std::uint8_t> valid;

  double at(std::size_t ka, std::size_t kb) const { return b2[domain.index(ka, kb)]; }
  bool is_valid(std::size_t ka, std::size_t kb) const {
    return valid[domain.index(ka, kb)] != 0;
  }
};

inline constexpr double kDefaultPowerFloor = 1e-12;

/// b2 = |acc|^2 / (p_ab p_g). A cell is valid when its denominator is at
/// least power_floor times the largest denominator in the domain; invalid
/// cells hold b2 = 0. An all-zero input therefore has no valid cell.
BicoherenceMap bicoherence(const BispectrumEstimate& est, double power_floor = kDefaultPowerFloor);

/// arg(acc(ka, kb)) in (-pi, pi]. Throws when |acc| < 1e-12.
double biphase(const BispectrumEstimate& est, std::size_t ka, std::size_t kb);

struct Peak {
  std::size_t ka = 0;
  std::size_t kb = 0;
  double mean_magnitude = 0.0;  // |acc| / m
  double b2 = 0.0;
  double biphase = 0.0;
  std::optional<double> p_value;
};

struct PeakReport {
  std::vector<Peak> peaks;  // b2 descending, then (ka, kb) ascending
  double threshold_b2 = 0.0;
  std::size_t surrogates_used = 0;
};

inline constexpr double kDefaultThreshold = 0.6;
/// Slack applied to the threshold comparison so that b2 == 1 up to rounding
/// still passes a threshold of exactly 1.
inline constexpr double kThresholdSlack = 1e-9;

/// Orders peaks by b2 descending, then (ka, kb) ascending.
void sort_peaks(std::vector<Peak>& peaks);

PeakReport detect_peaks(const BicoherenceMap& map, const BispectrumEstimate& est,
                        double threshold_b2 = kDefaultThreshold);

/// Mean b2 over valid cells. Throws when no cell is valid.
double coupling_index(const BicoherenceMap& map);

/// Multiplies bins 1..n/2-1 by independent uniform phases and mirrors the
/// conjugates, so magnitudes and conjugate symmetry are preserved. Bin 0
/// and the Nyquist bin are left unchanged.
Spectrum phase_randomize(const Spectrum& spectrum, std::uint64_t seed, std::uint64_t index);

struct SurrogateResult {
  Cell target;
  double observed_b2 = 0.0;
  std::vector<double> surrogate_b2;
  double p_value = 1.0;
};

inline constexpr std::size_t kMinSurrogates = 19;
inline constexpr std::size_t kDefaultSurrogates = 99;

/// Phase-randomization test of b2 at target. Each surrogate randomizes the
/// phases of every segment independently and recomputes b2 at target;
/// p = (1 + #{surrogate b2 >= observed}) / (n_surrogates + 1).
SurrogateResult surrogate_test(std::span<const Spectrum> spectra, Cell target,
                               std::size_t n_surrogates, std::uint64_t seed);
SurrogateResult surrogate_test(std::span<const TimeSeries> segments, Cell target,
                               std::size_t n_surrogates, std::uint64_t seed);

}  // namespace bispectral
