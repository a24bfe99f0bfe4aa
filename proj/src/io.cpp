#include "bispectral/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bispectral/error.hpp"

namespace bispectral::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_field(std::string_view s, const std::string& context) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(context + ": bad number '" + std::string(s) + "'");
  }
  return value;
}

std::string line_context(const std::string& name, std::size_t line) {
  return name + " line " + std::to_string(line);
}

}  // namespace

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

DenseMatrix bicoherence_matrix(const BicoherenceMap& map) {
  const PrincipalDomain& d = map.domain;
  DenseMatrix m(d.max_ka() + 1, d.max_kb() + 1);
  const auto cells = d.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (map.valid[i]) m(cells[i].ka, cells[i].kb) = map.b2[i];
  }
  return m;
}

HeatmapImage to_heatmap(const DenseMatrix& matrix) {
  HeatmapImage img{matrix.cols, matrix.rows, std::vector<std::uint8_t>(matrix.values.size(), 0)};
  double max_value = 0.0;
  for (double v : matrix.values) {
    if (!std::isfinite(v)) throw Error("heatmap matrix contains a non-finite value");
    max_value = std::max(max_value, v);
  }
  if (max_value <= 0.0) return img;
  for (std::size_t i = 0; i < matrix.values.size(); ++i) {
    const double v = std::max(0.0, matrix.values[i]);
    const double scaled = std::floor(v / max_value * 255.0 + 0.5);
    img.pixels[i] = static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
  }
  return img;
}

void write_pgm(std::ostream& out, const HeatmapImage& image) {
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

void write_heatmap(const DenseMatrix& matrix, const std::string& path) {
  const HeatmapImage image = to_heatmap(matrix);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_pgm(out, image);
  out.flush();
  if (!out) throw Error("failed writing heatmap to '" + path + "'");
}

void write_ensemble_csv(std::ostream& out, const Ensemble& ensemble) {
  const std::size_t m = ensemble.realizations.size();
  for (std::size_t r = 0; r < m; ++r) out << (r ? "," : "") << 'r' << r;
  out << '\n';
  const std::size_t n = ensemble.length();
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t r = 0; r < m; ++r) {
      out << (r ? "," : "") << format_number(ensemble.realizations[r][t]);
    }
    out << '\n';
  }
}

bool is_ensemble_header(const std::string& header_line) {
  std::string_view line = header_line;
  if (line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
  const auto fields = split(line);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] != "r" + std::to_string(i)) return false;
  }
  return !fields.empty();
}

Ensemble read_ensemble_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw Error(name + ": empty ensemble file");
  }
  if (!is_ensemble_header(line)) {
    throw Error(name + ": header must be r0,r1,...");
  }
  const std::size_t m = split(line).size();
  std::vector<std::vector<double>> columns(m);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != m) {
      throw Error(line_context(name, line_no) + ": expected " + std::to_string(m) +
                  " columns, found " + std::to_string(fields.size()));
    }
    for (std::size_t r = 0; r < m; ++r) {
      columns[r].push_back(parse_field<double>(fields[r], line_context(name, line_no)));
    }
  }
  if (columns.front().size() < 2) {
    throw Error(name + ": ensemble needs at least 2 samples per realization");
  }
  Ensemble e;
  e.realizations.reserve(m);
  for (std::size_t r = 0; r < m; ++r) {
    e.realizations.emplace_back(std::move(columns[r]), 1.0, "r" + std::to_string(r));
  }
  return e;
}

void write_phases_csv(std::ostream& out, const Ensemble& ensemble) {
  out << "realization,theta_alpha,theta_beta,theta_gamma\n";
  for (std::size_t r = 0; r < ensemble.phases.size(); ++r) {
    const PhaseTriple& p = ensemble.phases[r];
    out << r << ',' << format_number(p.alpha) << ',' << format_number(p.beta) << ','
        << format_number(p.gamma) << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const std::vector<double>& mean_power) {
  out << "bin,mean_power\n";
  for (std::size_t k = 0; k < mean_power.size(); ++k) {
    out << k << ',' << format_number(mean_power[k]) << '\n';
  }
}

void write_bispectrum_csv(std::ostream& out, const BispectrumEstimate& est) {
  out << "ka,kb,re,im\n";
  const auto cells = est.domain().cells();
  const auto acc = est.acc();
  const auto m = static_cast<double>(est.m());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Complex mean = acc[i] / m;
    out << cells[i].ka << ',' << cells[i].kb << ',' << format_number(mean.real()) << ','
        << format_number(mean.imag()) << '\n';
  }
}

void write_bicoherence_csv(std::ostream& out, const BicoherenceMap& map) {
  out << "ka,kb,b2,valid\n";
  const auto cells = map.domain.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out << cells[i].ka << ',' << cells[i].kb << ',' << format_number(map.b2[i]) << ','
        << (map.valid[i] ? 1 : 0) << '\n';
  }
}

void write_bicoherence_matrix_csv(std::ostream& out, const BicoherenceMap& map) {
  const PrincipalDomain& d = map.domain;
  out << "ka";
  for (std::size_t kb = 1; kb <= d.max_kb(); ++kb) out << ",kb" << kb;
  out << '\n';
  for (std::size_t ka = 1; ka <= d.max_ka(); ++ka) {
    out << ka;
    for (std::size_t kb = 1; kb <= d.max_kb(); ++kb) {
      out << ',';
      if (d.contains(ka, kb) && map.is_valid(ka, kb)) out << format_number(map.at(ka, kb));
    }
    out << '\n';
  }
}

std::vector<BispectrumRow> read_bispectrum_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "ka,kb,re,im") {
    throw Error("bispectrum.csv: header must be ka,kb,re,im");
  }
  std::vector<BispectrumRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    const std::string ctx = line_context("bispectrum.csv", line_no);
    if (f.size() != 4) throw Error(ctx + ": expected 4 fields");
    rows.push_back({parse_field<std::size_t>(f[0], ctx), parse_field<std::size_t>(f[1], ctx),
                    Complex(parse_field<double>(f[2], ctx), parse_field<double>(f[3], ctx))});
  }
  return rows;
}

std::vector<BicoherenceRow> read_bicoherence_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "ka,kb,b2,valid") {
    throw Error("bicoherence.csv: header must be ka,kb,b2,valid");
  }
  std::vector<BicoherenceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    const std::string ctx = line_context("bicoherence.csv", line_no);
    if (f.size() != 4) throw Error(ctx + ": expected 4 fields");
    rows.push_back({parse_field<std::size_t>(f[0], ctx), parse_field<std::size_t>(f[1], ctx),
                    parse_field<double>(f[2], ctx), parse_field<int>(f[3], ctx) != 0});
  }
  return rows;
}

KeyValues read_config(std::istream& in) {
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error("config line " + std::to_string(line_no) + ": expected key=value");
    }
    out.emplace_back(std::string(trim(s.substr(0, eq))), std::string(trim(s.substr(eq + 1))));
  }
  return out;
}

void write_config(std::ostream& out, const KeyValues& values, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  for (const auto& [k, v] : values) out << k << '=' << v << '\n';
}

}  // namespace bispectral::io
