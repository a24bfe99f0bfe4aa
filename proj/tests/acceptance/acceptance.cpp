// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bispectral/bispectrum.hpp"
#include "bispectral/cli.hpp"
#include "bispectral/ingest.hpp"
#include "bispectral/spectral.hpp"
#include "bispectral/synth.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace bispectral;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Literal sum with a long double twiddle table; faster than oracle::naive_dft
// for 100 series but the same arithmetic definition.
std::vector<Complex> literal_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<long double>> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    const long double angle =
        -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(j) / static_cast<long double>(n);
    w[j] = {std::cos(angle), std::sin(angle)};
  }
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<long double> sum = 0;
    for (std::size_t t = 0; t < n; ++t) sum += static_cast<long double>(x[t]) * w[(k * t) % n];
    out[k] = Complex(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
  }
  return out;
}

std::vector<std::vector<double>> corpus() {
  std::vector<std::vector<double>> out;
  const std::size_t sizes[] = {8, 64, 256, 1024};
  for (std::size_t i = 0; i < 100; ++i) out.push_back(oracle::random_series(sizes[i % 4], 5000 + i));
  return out;
}

Ensemble make(Coupling c, double noise, std::uint64_t seed) {
  SynthParams p;
  p.coupling = c;
  p.noise_amplitude = noise;
  p.seed = seed;
  return generate(p);
}

int bispec(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
  }
  return files;
}

std::vector<std::string> report_peaks(const fs::path& report) {
  std::istringstream in(slurp(report));
  std::vector<std::string> rows;
  std::string line;
  bool table = false;
  while (std::getline(in, line)) {
    if (line == "[peaks]") {
      table = true;
      std::getline(in, line);
    } else if (table && !line.empty()) {
      rows.push_back(line);
    }
  }
  return rows;
}

const fs::path kScratch = BISPECTRAL_SCRATCH_DIR;
const std::string kFixture = std::string(BISPECTRAL_FIXTURE_DIR) + "/ticks_3day.csv";

// Criterion 3 end to end through the tool: synth then analyze.
bool run_coupled_pipeline(const fs::path& root) {
  return bispec({"synth", "--out", (root / "synth").string(), "--mode", "coupled", "--seed", "42"}) == 0 &&
         bispec({"analyze", "--input", (root / "synth" / "ensemble.csv").string(), "--out",
                 (root / "analysis").string()}) == 0;
}

bool run_ticks_pipeline(const fs::path& root) {
  return bispec({"analyze", "--input", kFixture, "--out", root.string(), "--transform", "log_return",
                 "--segment-length", "256"}) == 0;
}

// ------------------------------------------------------------ criteria

Outcome criterion1() {
  Outcome o;
  double worst = 0.0;
  for (const auto& x : corpus()) {
    const Spectrum fast = dft(TimeSeries(x));
    const auto slow = literal_dft(x);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double err = std::abs(fast[k] - slow[k]) / std::max(std::abs(slow[k]), 1.0);
      worst = std::max(worst, err);
    }
  }
  o.require(worst <= 1e-9, "max relative bin error " + fmt(worst));
  o.detail = o.pass ? "max relative bin error " + fmt(worst) : o.detail;
  return o;
}

Outcome criterion2() {
  Outcome o;
  double parseval = 0.0;
  double symmetry = 0.0;
  for (const auto& x : corpus()) {
    const Spectrum f = dft(TimeSeries(x));
    const std::size_t n = x.size();
    double te = 0.0;
    for (double v : x) te += v * v;
    double fe = 0.0;
    for (const Complex& c : f.bins()) fe += std::norm(c);
    fe /= static_cast<double>(n);
    parseval = std::max(parseval, std::abs(te - fe) / te);
    for (std::size_t k = 1; k < n; ++k) {
      symmetry = std::max(symmetry,
                          std::abs(f[n - k] - std::conj(f[k])) / std::max(1.0, std::abs(f[k])));
    }
  }
  o.require(parseval <= 1e-9, "Parseval relative error " + fmt(parseval));
  o.require(symmetry <= 1e-9, "conjugate symmetry error " + fmt(symmetry));
  if (o.pass) o.detail = "Parseval " + fmt(parseval) + ", symmetry " + fmt(symmetry);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const fs::path root = kScratch / "c3";
  fs::remove_all(root);
  o.require(run_coupled_pipeline(root), "synth/analyze exited nonzero");
  if (!o.pass) return o;
  const auto rows = report_peaks(root / "analysis" / "report.txt");
  o.require(rows.size() == 1, std::to_string(rows.size()) + " peaks reported");
  if (!o.pass) return o;
  std::vector<std::string> f;
  std::stringstream ss(rows[0]);
  for (std::string s; std::getline(ss, s, ',');) f.push_back(s);
  o.require(f.size() >= 5 && f[0] == "9" && f[1] == "5", "peak row " + rows[0]);
  if (!o.pass) return o;
  const double b2 = std::stod(f[2]);
  const double phase = std::stod(f[4]);
  o.require(b2 >= 0.9, "b2 " + fmt(b2));
  o.require(std::abs(phase) <= 0.1, "biphase " + fmt(phase));
  if (o.pass) o.detail = "peak (9,5) b2=" + fmt(b2) + " biphase=" + fmt(phase);
  return o;
}

Outcome criterion4() {
  Outcome o;
  double worst = 0.0;
  std::size_t peaks = 0;
  for (std::uint64_t seed = 42; seed < 62; ++seed) {
    const Ensemble e = make(Coupling::independent, 0.05, seed);
    const BispectrumEstimate est = bispectrum(std::span<const TimeSeries>(e.realizations));
    const BicoherenceMap map = bicoherence(est);
    peaks += detect_peaks(map, est).peaks.size();
    worst = std::max(worst, map.at(9, 5));
  }
  o.require(peaks == 0, std::to_string(peaks) + " peaks over 20 seeds");
  o.require(worst <= 0.1, "max b2(9,5) " + fmt(worst));
  if (o.pass) o.detail = "0 peaks over 20 seeds, max b2(9,5)=" + fmt(worst);
  return o;
}

Outcome criterion5() {
  Outcome o;
  const Ensemble a = make(Coupling::coupled, 0.0, 42);
  const Ensemble b = make(Coupling::independent, 0.0, 42);
  double worst = 0.0;
  for (std::size_t r = 0; r < a.realizations.size(); ++r) {
    const PowerSpectrum pa = power_spectrum(dft(a.realizations[r]));
    const PowerSpectrum pb = power_spectrum(dft(b.realizations[r]));
    for (std::size_t k = 0; k < pa.power.size(); ++k) {
      worst = std::max(worst, std::abs(pa.power[k] - pb.power[k]));
    }
  }
  const double b2a = bicoherence(bispectrum(std::span<const TimeSeries>(a.realizations))).at(9, 5);
  const double b2b = bicoherence(bispectrum(std::span<const TimeSeries>(b.realizations))).at(9, 5);
  o.require(worst <= 1e-9, "power spectra differ by " + fmt(worst));
  o.require(b2a - b2b >= 0.8, "b2 difference " + fmt(b2a - b2b));
  if (o.pass) o.detail = "power diff " + fmt(worst) + ", b2 " + fmt(b2a) + " vs " + fmt(b2b);
  return o;
}

Outcome criterion6() {
  Outcome o;
  const Ensemble e = make(Coupling::coupled, 0.0, 42);
  const BispectrumEstimate est = bispectrum(std::span<const TimeSeries>(e.realizations));
  const double b2 = bicoherence(est).at(9, 5);
  const double mag = std::abs(est.mean(9, 5));
  const double expected = 128.0 * 128.0 * 128.0;
  o.require(std::abs(b2 - 1.0) <= 1e-9, "b2 " + fmt(b2));
  o.require(std::abs(mag - expected) <= 1e-6 * expected, "|mean P| " + fmt(mag));
  if (o.pass) o.detail = "b2-1=" + fmt(b2 - 1.0) + ", |P|/128^3-1=" + fmt(mag / expected - 1.0);
  return o;
}

Outcome criterion7() {
  Outcome o;
  double shift_err = 0.0;
  double scale_err = 0.0;
  double b2_err = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<TimeSeries> base;
    std::vector<TimeSeries> shifted;
    std::vector<TimeSeries> scaled;
    const double c = 0.5 + trial;
    const std::size_t shift = 5 + 13 * trial;
    for (int j = 0; j < 8; ++j) {
      const auto x = oracle::random_series(128, 700 + 10 * trial + j);
      std::vector<double> y(x.size());
      std::vector<double> z(x.size());
      for (std::size_t t = 0; t < x.size(); ++t) {
        y[(t + shift) % x.size()] = x[t];
        z[t] = c * x[t];
      }
      base.emplace_back(x);
      shifted.emplace_back(y);
      scaled.emplace_back(z);
    }
    const BispectrumEstimate e0 = bispectrum(std::span<const TimeSeries>(base));
    const BispectrumEstimate e1 = bispectrum(std::span<const TimeSeries>(shifted));
    const BispectrumEstimate e2 = bispectrum(std::span<const TimeSeries>(scaled));
    const BicoherenceMap m0 = bicoherence(e0);
    const BicoherenceMap m2 = bicoherence(e2);
    for (std::size_t i = 0; i < e0.domain().size(); ++i) {
      const double p0 = std::abs(e0.acc()[i]);
      const double denom = std::max(p0, 1e-300);
      shift_err = std::max(shift_err, std::abs(std::abs(e1.acc()[i]) - p0) / denom);
      scale_err = std::max(scale_err, std::abs(std::abs(e2.acc()[i]) - c * c * c * p0) / (c * c * c * denom));
      b2_err = std::max(b2_err, std::abs(m2.b2[i] - m0.b2[i]));
    }
  }
  std::vector<Spectrum> spectra;
  for (int j = 0; j < 6; ++j) spectra.push_back(dft(TimeSeries(oracle::random_series(32, 900 + j))));
  const auto full = bispectrum_full(spectra);
  bool symmetric = true;
  for (std::size_t a = 0; a < 32; ++a) {
    for (std::size_t b = 0; b < 32; ++b) symmetric = symmetric && full[a * 32 + b] == full[b * 32 + a];
  }
  o.require(shift_err <= 1e-9, "shift error " + fmt(shift_err));
  o.require(scale_err <= 1e-9, "cubic scaling error " + fmt(scale_err));
  o.require(b2_err <= 1e-9, "b2 scaling error " + fmt(b2_err));
  o.require(symmetric, "P(a,b) != P(b,a) on n=32");
  if (o.pass) {
    o.detail = "shift " + fmt(shift_err) + ", scale " + fmt(scale_err) + ", b2 " + fmt(b2_err) +
               ", n=32 symmetric";
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  const Ensemble coupled = make(Coupling::coupled, 0.05, 42);
  const SurrogateResult rc =
      surrogate_test(std::span<const TimeSeries>(coupled.realizations), {9, 5}, 99, 7);
  o.require(rc.p_value <= 0.05, "coupled p " + fmt(rc.p_value));
  int not_significant = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Ensemble e = make(Coupling::independent, 0.05, 100 + i);
    const SurrogateResult r = surrogate_test(std::span<const TimeSeries>(e.realizations), {9, 5}, 99, i);
    if (r.p_value >= 0.05) ++not_significant;
  }
  o.require(not_significant >= 18, std::to_string(not_significant) + "/20 uncoupled trials with p >= 0.05");
  if (o.pass) {
    o.detail = "coupled p=" + fmt(rc.p_value) + ", uncoupled " + std::to_string(not_significant) +
               "/20 with p >= 0.05";
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  const ParsedTicks ticks = parse_ticks_file(kFixture);
  const SessionSeries sessions = sessionize(ticks.records, 60);
  o.require(sessions.sessions.size() == 3, std::to_string(sessions.sessions.size()) + " sessions");
  o.require(sessions.fill_count == 1, "fill count " + std::to_string(sessions.fill_count));
  const SessionSeries returns = transform(sessions, TransformKind::log_return);
  o.require(returns.sessions.size() == sessions.sessions.size(), "log_return dropped a session");
  if (!o.pass) return o;
  for (std::size_t s = 0; s < sessions.sessions.size(); ++s) {
    o.require(returns.sessions[s].values.size() + 1 == sessions.sessions[s].values.size(),
              "session " + std::to_string(s) + " log_return length mismatch");
  }
  const fs::path root = kScratch / "c9";
  fs::remove_all(root);
  o.require(run_ticks_pipeline(root), "analyze exited nonzero");
  for (const char* f : {"spectrum.csv", "bispectrum.csv", "bicoherence.csv", "bicoherence.pgm", "report.txt"}) {
    o.require(fs::is_regular_file(root / f), std::string("missing ") + f);
  }
  if (o.pass) {
    o.detail = "3 sessions of " + std::to_string(sessions.sessions[0].values.size()) +
               " samples, fill 1, analyze wrote all files";
  }
  return o;
}

Outcome criterion10() {
  Outcome o;
  const fs::path c3 = kScratch / "c3";
  const fs::path c9 = kScratch / "c9";
  if (!fs::exists(c3) && !run_coupled_pipeline(c3)) o.require(false, "first coupled run failed");
  if (!fs::exists(c9) && !run_ticks_pipeline(c9)) o.require(false, "first tick run failed");
  if (!o.pass) return o;
  const auto before3 = snapshot(c3);
  const auto before9 = snapshot(c9);
  o.require(run_coupled_pipeline(c3), "repeat coupled run failed");
  o.require(run_ticks_pipeline(c9), "repeat tick run failed");
  if (!o.pass) return o;
  o.require(snapshot(c3) == before3, "coupled output directory changed on repeat");
  o.require(snapshot(c9) == before9, "tick output directory changed on repeat");
  if (o.pass) {
    o.detail = std::to_string(before3.size() + before9.size()) + " files byte-identical";
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  fs::create_directories(kScratch);
  const std::vector<Criterion> criteria{
      {1, "fast transform equals the literal sum", 10.0, criterion1},
      {2, "Parseval and conjugate symmetry", 0.0, criterion2},
      {3, "coupled ensemble gives one peak at (9,5)", 5.0, criterion3},
      {4, "uncoupled ensembles give no peaks", 30.0, criterion4},
      {5, "equal power spectra, different bicoherence", 0.0, criterion5},
      {6, "noiseless exactness", 0.0, criterion6},
      {7, "shift, scaling and symmetry laws", 0.0, criterion7},
      {8, "surrogate calibration", 60.0, criterion8},
      {9, "tick fixture ingestion and analysis", 0.0, criterion9},
      {10, "repeat runs are byte-identical", 0.0, criterion10},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.budget_s > 0.0 && secs >= c.budget_s) {
      o.require(false, "runtime " + fmt(secs) + " s over " + fmt(c.budget_s) + " s budget");
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d: %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
