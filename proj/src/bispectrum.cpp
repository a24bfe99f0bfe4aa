#include "bispectral/bispectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "bispectral/error.hpp"
#include "bispectral/rng.hpp"

namespace bispectral {

namespace {

std::string cell_name(std::size_t ka, std::size_t kb) {
  return "(" + std::to_string(ka) + "," + std::to_string(kb) + ")";
}

// Triple-product terms for one cell of one spectrum.
struct Triple {
  Complex product;
  double p_ab;
  double p_g;
};

Triple triple(const Spectrum& s, std::size_t ka, std::size_t kb) {
  const Complex fa = s[ka];
  const Complex fb = s[kb];
  const Complex fg = s[ka + kb];
  const Complex ab = fa * fb;
  return {ab * std::conj(fg), std::norm(ab), std::norm(fg)};
}

double ratio_b2(const Complex& acc, double p_ab, double p_g) {
  const double denom = p_ab * p_g;
  if (!(denom > 0.0)) return 0.0;
  return std::norm(acc) / denom;
}

void check_same_length(std::span<const Spectrum> spectra) {
  if (spectra.empty()) throw Error("bispectrum needs at least one spectrum");
  const std::size_t n = spectra.front().n();
  for (std::size_t j = 1; j < spectra.size(); ++j) {
    if (spectra[j].n() != n) {
      throw Error("spectrum " + std::to_string(j) + " has length " +
                  std::to_string(spectra[j].n()) + ", expected " + std::to_string(n));
    }
  }
}

std::vector<Spectrum> transform_all(std::span<const TimeSeries> segments) {
  std::vector<Spectrum> spectra;
  spectra.reserve(segments.size());
  for (const TimeSeries& s : segments) spectra.push_back(dft(s));
  return spectra;
}

}  // namespace

PrincipalDomain::PrincipalDomain(std::size_t n) : n_(n) {
  if (n < 4) throw Error("bispectrum segment length must be >= 4, got " + std::to_string(n));
  const std::size_t half = n / 2;
  row_offset_.assign(half + 1, 0);
  for (std::size_t ka = 1; ka < half; ++ka) {
    row_offset_[ka] = cells_.size();
    const std::size_t width = std::min(ka, half - ka);
    for (std::size_t kb = 1; kb <= width; ++kb) cells_.push_back({ka, kb});
  }
  row_offset_[half] = cells_.size();
}

bool PrincipalDomain::contains(std::size_t ka, std::size_t kb) const noexcept {
  return kb >= 1 && kb <= ka && ka + kb <= n_ / 2;
}

std::size_t PrincipalDomain::index(std::size_t ka, std::size_t kb) const {
  if (!contains(ka, kb)) {
    throw Error("cell " + cell_name(ka, kb) + " is outside the principal domain for n=" +
                std::to_string(n_) + " (1 <= kb <= ka, ka + kb <= n/2)");
  }
  return row_offset_[ka] + (kb - 1);
}

BispectrumEstimate::BispectrumEstimate(std::size_t n)
    : domain_(n), acc_(domain_.size()), p_ab_(domain_.size()), p_g_(domain_.size()) {}

void BispectrumEstimate::accumulate(const Spectrum& spectrum) {
  if (spectrum.n() != n()) {
    throw Error("spectrum has length " + std::to_string(spectrum.n()) + ", expected " +
                std::to_string(n()));
  }
  const auto cells = domain_.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Triple t = triple(spectrum, cells[i].ka, cells[i].kb);
    acc_[i] += t.product;
    p_ab_[i] += t.p_ab;
    p_g_[i] += t.p_g;
  }
  ++m_;
}

void BispectrumEstimate::merge(const BispectrumEstimate& other) {
  if (other.n() != n()) throw Error("cannot merge bispectrum estimates of different length");
  for (std::size_t i = 0; i < acc_.size(); ++i) {
    acc_[i] += other.acc_[i];
    p_ab_[i] += other.p_ab_[i];
    p_g_[i] += other.p_g_[i];
  }
  m_ += other.m_;
}

BispectrumEstimate bispectrum(std::span<const Spectrum> spectra) {
  check_same_length(spectra);
  BispectrumEstimate est(spectra.front().n());
  for (const Spectrum& s : spectra) est.accumulate(s);
  return est;
}

BispectrumEstimate bispectrum(std::span<const TimeSeries> segments) {
  if (segments.empty()) throw Error("bispectrum needs at least one segment");
  const std::vector<Spectrum> spectra = transform_all(segments);
  return bispectrum(std::span<const Spectrum>(spectra));
}

std::vector<Complex> bispectrum_full(std::span<const Spectrum> spectra) {
  check_same_length(spectra);
  const std::size_t n = spectra.front().n();
  std::vector<Complex> full(n * n);
  for (const Spectrum& s : spectra) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        full[a * n + b] += s[a] * s[b] * std::conj(s[(a + b) % n]);
      }
    }
  }
  return full;
}

BicoherenceMap bicoherence(const BispectrumEstimate& est, double power_floor) {
  if (!(power_floor > 0.0) || !std::isfinite(power_floor)) {
    throw Error("power floor must be a positive number");
  }
  const std::size_t size = est.domain().size();
  BicoherenceMap map{est.domain(), std::vector<double>(size, 0.0),
                     std::vector<std::uint8_t>(size, 0)};
  const auto acc = est.acc();
  const auto p_ab = est.p_ab();
  const auto p_g = est.p_g();
  double max_denom = 0.0;
  for (std::size_t i = 0; i < size; ++i) max_denom = std::max(max_denom, p_ab[i] * p_g[i]);
  if (!(max_denom > 0.0)) return map;
  const double floor = power_floor * max_denom;
  for (std::size_t i = 0; i < size; ++i) {
    const double denom = p_ab[i] * p_g[i];
    if (denom > 0.0 && denom >= floor) {
      map.valid[i] = 1;
      map.b2[i] = std::norm(acc[i]) / denom;
    }
  }
  return map;
}

double biphase(const BispectrumEstimate& est, std::size_t ka, std::size_t kb) {
  const Complex a = est.acc(ka, kb);
  if (std::abs(a) < 1e-12) {
    throw Error("no phase information at cell " + cell_name(ka, kb) +
                ": accumulated bispectrum magnitude is below 1e-12");
  }
  const double phase = std::arg(a);
  return phase <= -std::numbers::pi ? std::numbers::pi : phase;
}

void sort_peaks(std::vector<Peak>& peaks) {
  std::sort(peaks.begin(), peaks.end(), [](const Peak& x, const Peak& y) {
    if (x.b2 != y.b2) return x.b2 > y.b2;
    if (x.ka != y.ka) return x.ka < y.ka;
    return x.kb < y.kb;
  });
}

PeakReport detect_peaks(const BicoherenceMap& map, const BispectrumEstimate& est,
                        double threshold_b2) {
  if (!(threshold_b2 > 0.0 && threshold_b2 <= 1.0)) {
    throw Error("peak threshold must be in (0, 1], got " + std::to_string(threshold_b2));
  }
  if (map.domain.n() != est.n()) throw Error("bicoherence map and estimate disagree on n");
  PeakReport report;
  report.threshold_b2 = threshold_b2;
  const auto cells = map.domain.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!map.valid[i] || map.b2[i] < threshold_b2 - kThresholdSlack) continue;
    const Complex a = est.acc()[i];
    double phase = std::arg(a);
    if (phase <= -std::numbers::pi) phase = std::numbers::pi;
    report.peaks.push_back({cells[i].ka, cells[i].kb,
                            std::abs(a) / static_cast<double>(est.m()), map.b2[i], phase,
                            std::nullopt});
  }
  sort_peaks(report.peaks);
  return report;
}

double coupling_index(const BicoherenceMap& map) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < map.b2.size(); ++i) {
    if (map.valid[i]) {
      sum += map.b2[i];
      ++count;
    }
  }
  if (count == 0) throw Error("coupling index undefined: bicoherence map has no valid cell");
  return sum / static_cast<double>(count);
}

Spectrum phase_randomize(const Spectrum& spectrum, std::uint64_t seed, std::uint64_t index) {
  const std::size_t n = spectrum.n();
  std::vector<Complex> bins(spectrum.bins().begin(), spectrum.bins().end());
  Stream rng(seed, index);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 1; 2 * k < n; ++k) {
    const double phi = rng.uniform(0.0, two_pi);
    bins[k] *= Complex(std::cos(phi), std::sin(phi));
    bins[n - k] = std::conj(bins[k]);
  }
  return Spectrum(std::move(bins));
}

SurrogateResult surrogate_test(std::span<const Spectrum> spectra, Cell target,
                               std::size_t n_surrogates, std::uint64_t seed) {
  check_same_length(spectra);
  const std::size_t n = spectra.front().n();
  const PrincipalDomain domain(n);
  if (!domain.contains(target.ka, target.kb)) {
    throw Error("surrogate target " + cell_name(target.ka, target.kb) +
                " is outside the principal domain for n=" + std::to_string(n));
  }
  if (n_surrogates < kMinSurrogates) {
    throw Error("surrogate count must be >= " + std::to_string(kMinSurrogates) + ", got " +
                std::to_string(n_surrogates));
  }

  auto target_b2 = [&](auto&& spectrum_of) {
    Complex acc{0.0, 0.0};
    double p_ab = 0.0;
    double p_g = 0.0;
    for (std::size_t j = 0; j < spectra.size(); ++j) {
      const Triple t = triple(spectrum_of(j), target.ka, target.kb);
      acc += t.product;
      p_ab += t.p_ab;
      p_g += t.p_g;
    }
    return std::pair{ratio_b2(acc, p_ab, p_g), p_ab * p_g};
  };

  SurrogateResult result;
  result.target = target;
  const auto [observed, denom] = target_b2([&](std::size_t j) -> const Spectrum& {
    return spectra[j];
  });
  if (!(denom > 0.0)) {
    throw Error("no power at surrogate target " + cell_name(target.ka, target.kb));
  }
  result.observed_b2 = observed;
  result.surrogate_b2.reserve(n_surrogates);
  std::size_t at_least = 0;
  for (std::size_t s = 0; s < n_surrogates; ++s) {
    const std::uint64_t surrogate_seed = mix_seed(seed ^ kSurrogateStream, s);
    const double b2 = target_b2([&](std::size_t j) {
                        return phase_randomize(spectra[j], surrogate_seed, j);
                      }).first;
    result.surrogate_b2.push_back(b2);
    if (b2 >= observed) ++at_least;
  }
  result.p_value =
      static_cast<double>(1 + at_least) / static_cast<double>(n_surrogates + 1);
  return result;
}

SurrogateResult surrogate_test(std::span<const TimeSeries> segments, Cell target,
                               std::size_t n_surrogates, std::uint64_t seed) {
  if (segments.empty()) throw Error("surrogate test needs at least one segment");
  const std::vector<Spectrum> spectra = transform_all(segments);
  return surrogate_test(std::span<const Spectrum>(spectra), target, n_surrogates, seed);
}

}  // namespace bispectral
