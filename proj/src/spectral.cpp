#include "bispectral/spectral.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "bispectral/error.hpp"

namespace bispectral {

TimeSeries::TimeSeries(std::vector<double> values, double dt, std::string label)
    : values_(std::move(values)), dt_(dt), label_(std::move(label)) {
  if (values_.size() < 2) {
    throw Error("time series needs at least 2 samples, got " + std::to_string(values_.size()));
  }
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
    throw Error("time series sample spacing must be a positive finite number");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error("time series sample " + std::to_string(i) + " is not finite");
    }
  }
}

Spectrum::Spectrum(std::vector<Complex> bins) : bins_(std::move(bins)) {
  if (bins_.size() < 2) {
    throw Error("spectrum needs at least 2 bins, got " + std::to_string(bins_.size()));
  }
  for (std::size_t k = 0; k < bins_.size(); ++k) {
    if (!std::isfinite(bins_[k].real()) || !std::isfinite(bins_[k].imag())) {
      throw Error("spectrum bin " + std::to_string(k) + " is not finite");
    }
  }
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::size_t previous_power_of_two(std::size_t n) noexcept {
  if (n == 0) return 0;
  std::size_t p = 1;
  while ((p << 1) <= n) p <<= 1;
  return p;
}

Spectrum dft_reference(const TimeSeries& series) {
  const std::size_t n = series.size();
  std::vector<Complex> bins(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex sum{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      // Reduce k*t mod n first so the angle stays in [0, 2 pi).
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                           static_cast<double>(n);
      sum += series[t] * Complex(std::cos(angle), std::sin(angle));
    }
    bins[k] = sum;
  }
  return Spectrum(std::move(bins));
}

namespace {

// In-place iterative radix-2 Cooley-Tukey. sign = -1 forward, +1 inverse
// (no scaling).
void fft_in_place(std::vector<Complex>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // Twiddles computed directly per index rather than by recurrence, which
  // keeps the error at O(eps log N).
  std::vector<Complex> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(n);
    twiddle[k] = Complex(std::cos(angle), std::sin(angle));
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex u = a[start + k];
        const Complex v = a[start + k + half] * twiddle[k * stride];
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

std::string length_error(std::size_t n) {
  return "transform length " + std::to_string(n) +
         " is not a power of two (accepted: 2, 4, 8, ...; nearest are " +
         std::to_string(previous_power_of_two(n)) + " and " +
         std::to_string(next_power_of_two(n)) +
         "); use length policy zero_pad or truncate to conform the input";
}

}  // namespace

Spectrum dft(const TimeSeries& series) {
  const std::size_t n = series.size();
  if (!is_power_of_two(n)) throw Error(length_error(n));
  std::vector<Complex> a(series.values().begin(), series.values().end());
  fft_in_place(a, -1);
  return Spectrum(std::move(a));
}

TimeSeries inverse_dft(const Spectrum& spectrum, double dt, std::string label) {
  const std::size_t n = spectrum.n();
  std::vector<Complex> a(spectrum.bins().begin(), spectrum.bins().end());
  if (is_power_of_two(n)) {
    fft_in_place(a, +1);
  } else {
    std::vector<Complex> out(n);
    for (std::size_t t = 0; t < n; ++t) {
      Complex sum{0.0, 0.0};
      for (std::size_t k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                             static_cast<double>(n);
        sum += a[k] * Complex(std::cos(angle), std::sin(angle));
      }
      out[t] = sum;
    }
    a = std::move(out);
  }
  std::vector<double> values(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) values[t] = a[t].real() * scale;
  return TimeSeries(std::move(values), dt, std::move(label));
}

PowerSpectrum power_spectrum(const Spectrum& spectrum) {
  PowerSpectrum out;
  out.power.reserve(spectrum.n());
  for (const Complex& c : spectrum.bins()) out.power.push_back(std::norm(c));
  return out;
}

std::string_view to_string(LengthPolicy policy) noexcept {
  switch (policy) {
    case LengthPolicy::strict: return "strict";
    case LengthPolicy::zero_pad: return "zero_pad";
    case LengthPolicy::truncate: return "truncate";
  }
  return "strict";
}

LengthPolicy parse_length_policy(std::string_view name) {
  if (name == "strict") return LengthPolicy::strict;
  if (name == "zero_pad" || name == "pad") return LengthPolicy::zero_pad;
  if (name == "truncate") return LengthPolicy::truncate;
  throw Error("unknown length policy '" + std::string(name) +
              "' (expected strict, zero_pad or truncate)");
}

ConformedSeries conform_length(const TimeSeries& series, LengthPolicy policy) {
  const std::size_t n = series.size();
  if (is_power_of_two(n)) return {series, n, LengthPolicy::strict};
  switch (policy) {
    case LengthPolicy::strict:
      throw Error(length_error(n));
    case LengthPolicy::zero_pad: {
      std::vector<double> v(series.values().begin(), series.values().end());
      v.resize(next_power_of_two(n), 0.0);
      return {TimeSeries(std::move(v), series.dt(), series.label()), n, policy};
    }
    case LengthPolicy::truncate: {
      const std::size_t keep = previous_power_of_two(n);
      std::vector<double> v(series.values().begin(), series.values().begin() + keep);
      return {TimeSeries(std::move(v), series.dt(), series.label()), n, policy};
    }
  }
  throw Error("unknown length policy");
}

}  // namespace bispectral
