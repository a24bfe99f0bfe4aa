#pragma once

// Discrete Fourier transform engine.
//
// Convention: unnormalized forward transform with a negative exponent,
//   F(k) = sum_{t=0}^{N-1} f(t) exp(-i 2 pi k t / N),
// and the 1/N factor carried by the inverse. Frequencies are bin indices
// k in [0, N), i.e. omega = 2 pi k / N rad/sample. The continuous transform
// with a +i exponent is the N -> infinity limit of this one up to the sign
// of omega; only the discrete form is implemented.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bispectral {

using Complex = std::complex<double>;

/// A uniformly sampled real series. Construction validates length >= 2,
/// finite samples and dt > 0; instances are immutable afterwards.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values, double dt = 1.0, std::string label = {});

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double dt() const noexcept { return dt_; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<double> values_;
  double dt_;
  std::string label_;
};

/// Complex DFT output over all N bins.
class Spectrum {
 public:
  static constexpr std::string_view kConvention = "unnormalized-forward";

  /// Throws if any bin is non-finite or fewer than two bins are given.
  explicit Spectrum(std::vector<Complex> bins);

  std::span<const Complex> bins() const noexcept { return bins_; }
  std::size_t n() const noexcept { return bins_.size(); }
  const Complex& operator[](std::size_t k) const { return bins_[k]; }
  std::string_view convention() const noexcept { return kConvention; }

 private:
  std::vector<Complex> bins_;
};

/// |F(k)|^2 per bin.
struct PowerSpectrum {
  std::vector<double> power;
};

/// Direct O(N^2) summation. Any length >= 2. This is the oracle the fast
/// path is checked against.
Spectrum dft_reference(const TimeSeries& series);

/// Iterative radix-2 FFT. Throws bispectral::Error for lengths that are not
/// a power of two; see conform_length() for the opt-in padding/truncation.
Spectrum dft(const TimeSeries& series);

/// Inverse transform with the 1/N factor. Imaginary residue is discarded.
TimeSeries inverse_dft(const Spectrum& spectrum, double dt = 1.0, std::string label = {});

PowerSpectrum power_spectrum(const Spectrum& spectrum);

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;
std::size_t previous_power_of_two(std::size_t n) noexcept;

enum class LengthPolicy { strict, zero_pad, truncate };

std::string_view to_string(LengthPolicy policy) noexcept;
LengthPolicy parse_length_policy(std::string_view name);

/// A series brought to a power-of-two length, with a record of what was done.
struct ConformedSeries {
  TimeSeries series;
  std::size_t original_length;
  LengthPolicy applied;  // strict when no change was needed
};

/// strict: error unless already a power of two. zero_pad: append zeros up
/// to the next power of two. truncate: keep the leading previous power of two.
ConformedSeries conform_length(const TimeSeries& series, LengthPolicy policy);

}  // namespace bispectral
