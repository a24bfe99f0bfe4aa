#include "bispectral/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bispectral/error.hpp"
#include "bispectral/rng.hpp"

namespace bispectral {

std::string_view to_string(Coupling c) noexcept {
  return c == Coupling::coupled ? "coupled" : "independent";
}

Coupling parse_coupling(std::string_view name) {
  if (name == "coupled") return Coupling::coupled;
  if (name == "independent" || name == "uncoupled") return Coupling::independent;
  throw Error("unknown coupling mode '" + std::string(name) +
              "' (expected coupled or uncoupled)");
}

void SynthParams::validate() const {
  if (!is_power_of_two(n) || n < 8) {
    throw Error("n must be a power of two >= 8, got " + std::to_string(n));
  }
  if (m < 1) throw Error("m (realization count) must be >= 1");
  if (k_alpha < 1) throw Error("ka must be >= 1, got " + std::to_string(k_alpha));
  if (k_beta < 1) throw Error("kb must be >= 1, got " + std::to_string(k_beta));
  const auto half = static_cast<long long>(n / 2);
  if (static_cast<long long>(k_alpha) + k_beta >= half) {
    throw Error("ka + kb must be < n/2 = " + std::to_string(half) + ", got " +
                std::to_string(k_alpha + k_beta));
  }
  if (k_gamma_explicit && (*k_gamma_explicit < 1 || *k_gamma_explicit >= half)) {
    throw Error("explicit kgamma must be in [1, n/2), got " + std::to_string(*k_gamma_explicit));
  }
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw Error("amplitude must be > 0");
  }
  if (!(noise_amplitude >= 0.0) || !std::isfinite(noise_amplitude)) {
    throw Error("noise amplitude must be >= 0");
  }
}

namespace {

TimeSeries three_cosines(const SynthParams& p, const PhaseTriple& ph, std::size_t index) {
  const double two_pi = 2.0 * std::numbers::pi;
  const auto n = static_cast<double>(p.n);
  const int kg = p.k_gamma();
  std::vector<double> v(p.n);
  for (std::size_t t = 0; t < p.n; ++t) {
    const auto td = static_cast<double>(t);
    v[t] = p.amplitude * std::cos(two_pi * p.k_alpha * td / n + ph.alpha) +
           p.amplitude * std::cos(two_pi * p.k_beta * td / n + ph.beta) +
           p.amplitude * std::cos(two_pi * kg * td / n + ph.gamma);
  }
  return TimeSeries(std::move(v), 1.0, "r" + std::to_string(index));
}

}  // namespace

Ensemble generate_with_phases(const SynthParams& params, std::span<const PhaseTriple> phases) {
  params.validate();
  if (phases.empty()) throw Error("at least one phase triple is required");
  Ensemble out;
  out.params = params;
  out.params->m = phases.size();
  out.phases.assign(phases.begin(), phases.end());
  out.realizations.reserve(phases.size());
  for (std::size_t r = 0; r < phases.size(); ++r) {
    out.realizations.push_back(three_cosines(params, phases[r], r));
  }
  if (params.noise_amplitude > 0.0) {
    Ensemble noisy = add_noise(out, params.noise_amplitude, params.seed);
    noisy.params = out.params;
    return noisy;
  }
  return out;
}

Ensemble generate(const SynthParams& params) {
  params.validate();
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<PhaseTriple> phases;
  phases.reserve(params.m);
  for (std::size_t r = 0; r < params.m; ++r) {
    Stream rng(params.seed ^ kPhaseStream, r);
    PhaseTriple ph{};
    ph.alpha = rng.uniform(0.0, two_pi);
    ph.beta = rng.uniform(0.0, two_pi);
    const double drawn_gamma = rng.uniform(0.0, two_pi);
    ph.gamma = params.coupling == Coupling::coupled ? ph.alpha + ph.beta : drawn_gamma;
    phases.push_back(ph);
  }
  return generate_with_phases(params, phases);
}

Ensemble add_noise(const Ensemble& ensemble, double noise_amplitude, std::uint64_t seed) {
  if (!(noise_amplitude >= 0.0) || !std::isfinite(noise_amplitude)) {
    throw Error("noise amplitude must be >= 0");
  }
  Ensemble out;
  out.params = ensemble.params;
  out.phases = ensemble.phases;
  out.realizations.reserve(ensemble.realizations.size());
  for (std::size_t r = 0; r < ensemble.realizations.size(); ++r) {
    const TimeSeries& src = ensemble.realizations[r];
    std::vector<double> v(src.values().begin(), src.values().end());
    if (noise_amplitude > 0.0) {
      Stream rng(seed ^ kNoiseStream, r);
      for (double& x : v) x += rng.uniform(-noise_amplitude, noise_amplitude);
    }
    out.realizations.emplace_back(std::move(v), src.dt(), src.label());
  }
  if (out.params) out.params->noise_amplitude = noise_amplitude;
  return out;
}

}  // namespace bispectral
