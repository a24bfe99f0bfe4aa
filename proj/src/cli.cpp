#include "bispectral/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bispectral/bispectrum.hpp"
#include "bispectral/error.hpp"
#include "bispectral/ingest.hpp"
#include "bispectral/io.hpp"
#include "bispectral/synth.hpp"

namespace bispectral::cli {

namespace {

namespace fs = std::filesystem;

/// Parameter validation failure; reported with exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::string out;
  std::string input;

  std::string mode = "coupled";
  std::size_t n = 256;
  std::size_t m = 64;
  int ka = 5;
  int kb = 9;
  int kgamma = 0;  // 0 selects kgamma = ka + kb
  double amplitude = 1.0;
  double noise = 0.05;
  std::uint64_t seed = 42;

  std::string length_policy = "strict";
  int max_gap = 60;
  std::string price_column = "close";
  std::string columns = "timestamp,open,high,low,close,volume";
  std::string transform = "raw";
  std::size_t segment_length = 256;
  double overlap = 0.0;
  std::string window = "rectangular";
  double threshold = kDefaultThreshold;
  double power_floor = kDefaultPowerFloor;

  std::size_t surrogates = kDefaultSurrogates;
  std::size_t target_ka = 0;  // 0 selects the strongest peak
  std::size_t target_kb = 0;
};

std::string default_out_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return "bispec_out";
}

// Registers options on a subcommand and remembers how to echo them.
class OptionSet {
 public:
  explicit OptionSet(CLI::App* app) : app_(app) {}

  template <typename T>
  OptionSet& add(const std::string& key, T& field, const std::string& help) {
    app_->add_option("--" + key, field, help)->capture_default_str();
    echo_.emplace_back(key, [&field] { return to_text(field); });
    return *this;
  }

  io::KeyValues values() const {
    io::KeyValues kv;
    for (const auto& [key, get] : echo_) kv.emplace_back(key, get());
    return kv;
  }

 private:
  template <typename T>
  static std::string to_text(const T& v) {
    if constexpr (std::is_same_v<T, std::string>) {
      return v;
    } else if constexpr (std::is_floating_point_v<T>) {
      return io::format_number(v);
    } else {
      return std::to_string(v);
    }
  }

  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::string()>>> echo_;
};

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  body(out);
  out.flush();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

fs::path prepare_out_dir(const std::string& out) {
  const fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error("cannot create output directory '" + out + "'");
  }
  return dir;
}

void echo_config(const fs::path& dir, const RunConfig& cfg, const OptionSet& options) {
  write_file(dir / "config.txt", [&](std::ostream& o) {
    io::write_config(o, options.values(), "bispec " + cfg.command);
  });
}

// ---------------------------------------------------------------- synth

SynthParams synth_params(const RunConfig& cfg) {
  SynthParams p;
  try {
    p.coupling = parse_coupling(cfg.mode);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  p.n = cfg.n;
  p.m = cfg.m;
  p.k_alpha = cfg.ka;
  p.k_beta = cfg.kb;
  if (cfg.kgamma != 0) p.k_gamma_explicit = cfg.kgamma;
  p.amplitude = cfg.amplitude;
  p.noise_amplitude = cfg.noise;
  p.seed = cfg.seed;
  try {
    p.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return p;
}

void cmd_synth(const RunConfig& cfg, const OptionSet& options, std::ostream& out) {
  const SynthParams params = synth_params(cfg);
  const Ensemble ensemble = generate(params);
  const fs::path dir = prepare_out_dir(cfg.out);
  write_file(dir / "ensemble.csv", [&](std::ostream& o) { io::write_ensemble_csv(o, ensemble); });
  write_file(dir / "phases.csv", [&](std::ostream& o) { io::write_phases_csv(o, ensemble); });
  echo_config(dir, cfg, options);
  out << "synth: wrote " << ensemble.realizations.size() << " realizations of length "
      << params.n << " to " << dir.string() << '\n';
}

// ------------------------------------------------------- shared analysis

struct Segments {
  std::vector<TimeSeries> series;
  std::string source;            // "ensemble" or "ticks"
  io::KeyValues notes;           // ingestion statistics for the report
};

TickColumns parse_columns(const std::string& spec) {
  std::vector<std::string> names;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) names.push_back(item);
  if (names.size() != 6) {
    throw UsageError("--columns needs six names: timestamp,open,high,low,close,volume");
  }
  return {names[0], names[1], names[2], names[3], names[4], names[5]};
}

Segments load_segments(const RunConfig& cfg) {
  if (cfg.input.empty()) throw UsageError("--input is required");
  std::ifstream in(cfg.input, std::ios::binary);
  if (!in) throw Error("cannot open input '" + cfg.input + "'");
  std::string header;
  if (!std::getline(in, header) || header.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(cfg.input + ": file is empty");
  }
  in.clear();
  in.seekg(0);

  Segments out;
  if (io::is_ensemble_header(header)) {
    const LengthPolicy policy = parse_length_policy(cfg.length_policy);
    const Ensemble ensemble = io::read_ensemble_csv(in, cfg.input);
    out.source = "ensemble";
    std::size_t original = 0;
    for (const TimeSeries& r : ensemble.realizations) {
      ConformedSeries c = conform_length(r, policy);
      original = c.original_length;
      out.series.push_back(std::move(c.series));
    }
    out.notes = {{"realizations", std::to_string(out.series.size())},
                 {"input_length", std::to_string(original)},
                 {"length_policy_applied",
                  std::string(to_string(is_power_of_two(original) ? LengthPolicy::strict
                                                                  : policy))}};
    return out;
  }

  const TickColumns columns = parse_columns(cfg.columns);
  ParsedTicks ticks = [&] {
    try {
      return parse_ticks(in, columns);
    } catch (const Error& e) {
      throw Error(cfg.input + ": " + e.what());
    }
  }();
  const SessionSeries sessions = sessionize(ticks.records, cfg.max_gap,
                                            parse_price_column(cfg.price_column));
  const SessionSeries transformed = transform(sessions, parse_transform(cfg.transform));
  SegmentSpec spec;
  spec.length = cfg.segment_length;
  spec.overlap = cfg.overlap;
  spec.window = parse_window(cfg.window);
  SegmentSet segs = segment(transformed, spec);
  out.source = "ticks";
  out.series = std::move(segs.segments);
  out.notes = {{"records", std::to_string(ticks.records.size())},
               {"duplicates_collapsed", std::to_string(ticks.duplicates_collapsed)},
               {"sessions", std::to_string(transformed.sessions.size())},
               {"gap_policy", transformed.gap_policy},
               {"fill_count", std::to_string(transformed.fill_count)},
               {"dropped_sessions", std::to_string(transformed.dropped_sessions)},
               {"segments", std::to_string(out.series.size())},
               {"dropped_samples", std::to_string(segs.dropped_samples)}};
  return out;
}

void validate_analysis(const RunConfig& cfg) {
  if (!(cfg.threshold > 0.0 && cfg.threshold <= 1.0)) {
    throw UsageError("--threshold must be in (0, 1]");
  }
  if (!(cfg.power_floor > 0.0)) throw UsageError("--power-floor must be > 0");
  try {
    parse_length_policy(cfg.length_policy);
    parse_price_column(cfg.price_column);
    parse_transform(cfg.transform);
    parse_window(cfg.window);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (!(cfg.overlap >= 0.0 && cfg.overlap <= 0.5)) throw UsageError("--overlap must be in [0, 0.5]");
  if (cfg.segment_length < 4 || !is_power_of_two(cfg.segment_length)) {
    throw UsageError("--segment-length must be a power of two >= 4");
  }
  if (cfg.max_gap < 1) throw UsageError("--max-gap must be >= 1");
}

void validate_surrogates(const RunConfig& cfg) {
  if (cfg.surrogates < kMinSurrogates) {
    throw UsageError("--surrogates must be >= " + std::to_string(kMinSurrogates) + ", got " +
                     std::to_string(cfg.surrogates));
  }
}

struct Analysis {
  Segments segments;
  std::vector<Spectrum> spectra;
  std::vector<double> mean_power;
  BispectrumEstimate estimate;
  BicoherenceMap map;
  PeakReport peaks;
};

Analysis analyze(const RunConfig& cfg) {
  Segments segs = load_segments(cfg);
  if (segs.series.empty()) throw Error(cfg.input + ": no segments to analyze");
  std::vector<Spectrum> spectra;
  spectra.reserve(segs.series.size());
  for (const TimeSeries& s : segs.series) spectra.push_back(dft(s));
  const std::size_t n = spectra.front().n();
  std::vector<double> mean_power(n, 0.0);
  for (const Spectrum& s : spectra) {
    const PowerSpectrum p = power_spectrum(s);
    for (std::size_t k = 0; k < n; ++k) mean_power[k] += p.power[k];
  }
  for (double& v : mean_power) v /= static_cast<double>(spectra.size());
  BispectrumEstimate est = bispectrum(std::span<const Spectrum>(spectra));
  BicoherenceMap map = bicoherence(est, cfg.power_floor);
  PeakReport peaks = detect_peaks(map, est, cfg.threshold);
  return {std::move(segs), std::move(spectra), std::move(mean_power), std::move(est),
          std::move(map), std::move(peaks)};
}

std::string coupling_text(const BicoherenceMap& map) {
  const bool any = std::any_of(map.valid.begin(), map.valid.end(), [](auto v) { return v != 0; });
  return any ? io::format_number(coupling_index(map)) : "undefined";
}

void write_peak_table(std::ostream& o, const std::vector<Peak>& peaks) {
  o << "[peaks]\n";
  o << "ka,kb,b2,mean_magnitude,biphase,p_value\n";
  for (const Peak& p : peaks) {
    o << p.ka << ',' << p.kb << ',' << io::format_number(p.b2) << ','
      << io::format_number(p.mean_magnitude) << ',' << io::format_number(p.biphase) << ','
      << (p.p_value ? io::format_number(*p.p_value) : "") << '\n';
  }
}

void cmd_analyze(const RunConfig& cfg, const OptionSet& options, std::ostream& out) {
  validate_analysis(cfg);
  const Analysis a = analyze(cfg);
  const fs::path dir = prepare_out_dir(cfg.out);
  write_file(dir / "spectrum.csv",
             [&](std::ostream& o) { io::write_spectrum_csv(o, a.mean_power); });
  write_file(dir / "bispectrum.csv",
             [&](std::ostream& o) { io::write_bispectrum_csv(o, a.estimate); });
  write_file(dir / "bicoherence.csv",
             [&](std::ostream& o) { io::write_bicoherence_csv(o, a.map); });
  write_file(dir / "bicoherence_matrix.csv",
             [&](std::ostream& o) { io::write_bicoherence_matrix_csv(o, a.map); });
  io::write_heatmap(io::bicoherence_matrix(a.map), (dir / "bicoherence.pgm").string());

  write_file(dir / "report.txt", [&](std::ostream& o) {
    o << "# bispec analysis report\n";
    o << "input=" << cfg.input << '\n';
    o << "source=" << a.segments.source << '\n';
    for (const auto& [k, v] : a.segments.notes) o << k << '=' << v << '\n';
    o << "segment_count=" << a.estimate.m() << '\n';
    o << "segment_length=" << a.estimate.n() << '\n';
    const auto valid = std::count(a.map.valid.begin(), a.map.valid.end(), std::uint8_t{1});
    o << "domain_cells=" << a.map.domain.size() << '\n';
    o << "valid_cells=" << valid << '\n';
    o << "power_floor=" << io::format_number(cfg.power_floor) << '\n';
    o << "threshold_b2=" << io::format_number(a.peaks.threshold_b2) << '\n';
    o << "coupling_index=" << coupling_text(a.map) << '\n';
    o << "peak_count=" << a.peaks.peaks.size() << '\n';
    write_peak_table(o, a.peaks.peaks);
  });
  echo_config(dir, cfg, options);
  out << "analyze: " << a.estimate.m() << " segments of length " << a.estimate.n() << ", "
      << a.peaks.peaks.size() << " peak(s) at b2 >= " << io::format_number(cfg.threshold)
      << "; wrote " << dir.string() << '\n';
}

// ---------------------------------------------------------------- peaks

void cmd_peaks(const RunConfig& cfg, const OptionSet& options, std::ostream& out) {
  validate_analysis(cfg);
  validate_surrogates(cfg);
  Analysis a = analyze(cfg);
  for (Peak& p : a.peaks.peaks) {
    const SurrogateResult r = surrogate_test(std::span<const Spectrum>(a.spectra),
                                             {p.ka, p.kb}, cfg.surrogates, cfg.seed);
    p.p_value = r.p_value;
  }
  a.peaks.surrogates_used = cfg.surrogates;
  const fs::path dir = prepare_out_dir(cfg.out);
  write_file(dir / "peaks.csv", [&](std::ostream& o) {
    o << "ka,kb,b2,mean_magnitude,biphase,p_value\n";
    for (const Peak& p : a.peaks.peaks) {
      o << p.ka << ',' << p.kb << ',' << io::format_number(p.b2) << ','
        << io::format_number(p.mean_magnitude) << ',' << io::format_number(p.biphase) << ','
        << io::format_number(*p.p_value) << '\n';
    }
  });
  echo_config(dir, cfg, options);
  out << "peaks: " << a.peaks.peaks.size() << " peak(s), " << cfg.surrogates
      << " surrogates each; wrote " << (dir / "peaks.csv").string() << '\n';
}

// ------------------------------------------------------------ surrogate

void cmd_surrogate(const RunConfig& cfg, const OptionSet& options, std::ostream& out) {
  validate_analysis(cfg);
  validate_surrogates(cfg);
  if ((cfg.target_ka == 0) != (cfg.target_kb == 0)) {
    throw UsageError("--target-ka and --target-kb must be given together");
  }
  const Analysis a = analyze(cfg);
  Cell target{cfg.target_ka, cfg.target_kb};
  if (target.ka == 0) {
    if (a.peaks.peaks.empty()) {
      throw Error("no valid target cell: no peak reaches b2 >= " +
                  io::format_number(cfg.threshold) + "; pass --target-ka and --target-kb");
    }
    target = {a.peaks.peaks.front().ka, a.peaks.peaks.front().kb};
  } else if (!a.map.domain.contains(target.ka, target.kb) ||
             !a.map.is_valid(target.ka, target.kb)) {
    throw Error("no valid target cell: (" + std::to_string(target.ka) + "," +
                std::to_string(target.kb) + ") is outside the domain or below the power floor");
  }
  const SurrogateResult r =
      surrogate_test(std::span<const Spectrum>(a.spectra), target, cfg.surrogates, cfg.seed);
  std::vector<double> sorted = r.surrogate_b2;
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(idx, 1, sorted.size()) - 1];
  };
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= static_cast<double>(sorted.size());

  const fs::path dir = prepare_out_dir(cfg.out);
  write_file(dir / "surrogate.txt", [&](std::ostream& o) {
    o << "# bispec surrogate test\n";
    o << "target_ka=" << target.ka << '\n';
    o << "target_kb=" << target.kb << '\n';
    o << "segments=" << a.estimate.m() << '\n';
    o << "observed_b2=" << io::format_number(r.observed_b2) << '\n';
    o << "surrogates=" << sorted.size() << '\n';
    o << "surrogate_min=" << io::format_number(sorted.front()) << '\n';
    o << "surrogate_median=" << io::format_number(quantile(0.5)) << '\n';
    o << "surrogate_mean=" << io::format_number(mean) << '\n';
    o << "surrogate_q95=" << io::format_number(quantile(0.95)) << '\n';
    o << "surrogate_max=" << io::format_number(sorted.back()) << '\n';
    o << "p_value=" << io::format_number(r.p_value) << '\n';
  });
  echo_config(dir, cfg, options);
  out << "surrogate: cell (" << target.ka << "," << target.kb << ") b2="
      << io::format_number(r.observed_b2) << " p=" << io::format_number(r.p_value) << '\n';
}

// --------------------------------------------------------------- report

void cmd_report(const RunConfig& cfg, const OptionSet& options, std::ostream& out) {
  if (cfg.input.empty()) throw UsageError("--input (an analyze output directory) is required");
  if (!(cfg.threshold > 0.0 && cfg.threshold <= 1.0)) {
    throw UsageError("--threshold must be in (0, 1]");
  }
  const fs::path src(cfg.input);
  std::ifstream bis(src / "bispectrum.csv", std::ios::binary);
  std::ifstream bic(src / "bicoherence.csv", std::ios::binary);
  if (!bis || !bic) {
    throw Error("'" + cfg.input + "' lacks bispectrum.csv or bicoherence.csv");
  }
  const auto bispec_rows = io::read_bispectrum_csv(bis);
  const auto bicoh_rows = io::read_bicoherence_csv(bic);
  if (bispec_rows.size() != bicoh_rows.size()) {
    throw Error("bispectrum.csv and bicoherence.csv disagree on the number of cells");
  }
  std::vector<Peak> peaks;
  double sum = 0.0;
  std::size_t valid = 0;
  for (std::size_t i = 0; i < bicoh_rows.size(); ++i) {
    const auto& c = bicoh_rows[i];
    const auto& b = bispec_rows[i];
    if (c.ka != b.ka || c.kb != b.kb) throw Error("cell order differs between the two CSVs");
    if (!c.valid) continue;
    sum += c.b2;
    ++valid;
    if (c.b2 >= cfg.threshold - kThresholdSlack) {
      double phase = std::arg(b.mean);
      if (phase <= -std::numbers::pi) phase = std::numbers::pi;
      peaks.push_back({c.ka, c.kb, std::abs(b.mean), c.b2, phase, std::nullopt});
    }
  }
  sort_peaks(peaks);
  const fs::path dir = prepare_out_dir(cfg.out);
  std::ostringstream text;
  text << "# bispec summary of " << cfg.input << '\n';
  text << "domain_cells=" << bicoh_rows.size() << '\n';
  text << "valid_cells=" << valid << '\n';
  text << "threshold_b2=" << io::format_number(cfg.threshold) << '\n';
  text << "coupling_index="
       << (valid ? io::format_number(sum / static_cast<double>(valid)) : "undefined") << '\n';
  text << "peak_count=" << peaks.size() << '\n';
  write_peak_table(text, peaks);
  write_file(dir / "summary.txt", [&](std::ostream& o) { o << text.str(); });
  echo_config(dir, cfg, options);
  out << text.str();
}

// ---------------------------------------------------------------- driver

void add_analysis_options(OptionSet& o, RunConfig& cfg) {
  o.add("input", cfg.input, "ensemble CSV (header r0,r1,...) or minute-bar tick CSV")
      .add("length-policy", cfg.length_policy, "non-power-of-two ensembles: strict|zero_pad|truncate")
      .add("max-gap", cfg.max_gap, "ticks: largest gap in minutes that stays within a session")
      .add("price-column", cfg.price_column, "ticks: open|high|low|close")
      .add("columns", cfg.columns, "ticks: header names for timestamp,open,high,low,close,volume")
      .add("transform", cfg.transform, "ticks: raw|demean|log_return|first_difference")
      .add("segment-length", cfg.segment_length, "ticks: samples per segment (power of two)")
      .add("overlap", cfg.overlap, "ticks: segment overlap fraction in [0, 0.5]")
      .add("window", cfg.window, "ticks: rectangular|hann")
      .add("threshold", cfg.threshold, "peak threshold on squared bicoherence, in (0, 1]")
      .add("power-floor", cfg.power_floor, "relative denominator floor for valid cells");
}

// Splices key=value pairs from --config into the argument list. Flags given
// explicitly on the command line take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> user;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file argument");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      user.push_back(args[i]);
    }
  }
  if (config_path.empty()) return user;
  std::ifstream in(config_path);
  if (!in) throw UsageError("cannot read config file '" + config_path + "'");
  const io::KeyValues kv = io::read_config(in);
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(user.begin(), user.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> merged;
  std::size_t insert_at = 0;
  if (!user.empty() && user.front().rfind("-", 0) != 0) {
    merged.push_back(user.front());
    insert_at = 1;
  }
  for (const auto& [key, value] : kv) {
    if (!given(key)) merged.push_back("--" + key + "=" + value);
  }
  merged.insert(merged.end(), user.begin() + static_cast<std::ptrdiff_t>(insert_at), user.end());
  return merged;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.out = default_out_dir();

  CLI::App app{"bispec: bispectral phase-coupling analysis"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every command");

  auto* synth = app.add_subcommand("synth", "generate a three-cosine ensemble");
  auto* analyze_cmd = app.add_subcommand("analyze", "spectra, bispectrum, bicoherence and report");
  auto* peaks = app.add_subcommand("peaks", "detected peaks with surrogate p-values");
  auto* surrogate = app.add_subcommand("surrogate", "phase-randomization test at one cell");
  auto* report = app.add_subcommand("report", "summarize an analyze output directory");

  OptionSet synth_opts(synth);
  synth_opts.add("out", cfg.out, "output directory")
      .add("mode", cfg.mode, "coupled|uncoupled")
      .add("n", cfg.n, "samples per realization (power of two)")
      .add("m", cfg.m, "number of realizations")
      .add("ka", cfg.ka, "first frequency bin (>= 1)")
      .add("kb", cfg.kb, "second frequency bin (>= 1)")
      .add("kgamma", cfg.kgamma, "third bin; 0 means ka + kb")
      .add("amplitude", cfg.amplitude, "per-component amplitude")
      .add("noise", cfg.noise, "uniform noise half-width")
      .add("seed", cfg.seed, "random seed");

  OptionSet analyze_opts(analyze_cmd);
  analyze_opts.add("out", cfg.out, "output directory");
  add_analysis_options(analyze_opts, cfg);

  OptionSet peaks_opts(peaks);
  peaks_opts.add("out", cfg.out, "output directory");
  add_analysis_options(peaks_opts, cfg);
  peaks_opts.add("surrogates", cfg.surrogates, "surrogates per peak (>= 19)")
      .add("seed", cfg.seed, "random seed");

  OptionSet surrogate_opts(surrogate);
  surrogate_opts.add("out", cfg.out, "output directory");
  add_analysis_options(surrogate_opts, cfg);
  surrogate_opts.add("surrogates", cfg.surrogates, "number of surrogates (>= 19)")
      .add("seed", cfg.seed, "random seed")
      .add("target-ka", cfg.target_ka, "target cell ka (0: strongest peak)")
      .add("target-kb", cfg.target_kb, "target cell kb (0: strongest peak)");

  OptionSet report_opts(report);
  report_opts.add("out", cfg.out, "output directory")
      .add("input", cfg.input, "analyze output directory")
      .add("threshold", cfg.threshold, "peak threshold on squared bicoherence");

  try {
    std::vector<std::string> expanded = expand_config(args);
    std::reverse(expanded.begin(), expanded.end());
    app.parse(expanded);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "bispec: usage error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "bispec: usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "bispec: usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (synth->parsed()) {
      cfg.command = "synth";
      cmd_synth(cfg, synth_opts, out);
    } else if (analyze_cmd->parsed()) {
      cfg.command = "analyze";
      cmd_analyze(cfg, analyze_opts, out);
    } else if (peaks->parsed()) {
      cfg.command = "peaks";
      cmd_peaks(cfg, peaks_opts, out);
    } else if (surrogate->parsed()) {
      cfg.command = "surrogate";
      cmd_surrogate(cfg, surrogate_opts, out);
    } else if (report->parsed()) {
      cfg.command = "report";
      cmd_report(cfg, report_opts, out);
    }
  } catch (const UsageError& e) {
    err << "bispec: usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "bispec: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace bispectral::cli
