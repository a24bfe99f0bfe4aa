#pragma once

// File formats emitted and read by the command-line tool: ensemble and
// result CSVs, binary PGM heatmaps and key=value config files.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bispectral/bispectrum.hpp"
#include "bispectral/synth.hpp"

namespace bispectral::io {

/// Shortest round-trip decimal representation.
std::string format_number(double v);

/// Row-major real matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Principal-domain values laid out with row = ka and column = kb, so the
/// matrix is (n/2) x (n/4 + 1). Invalid and outside-domain cells are 0.
DenseMatrix bicoherence_matrix(const BicoherenceMap& map);

struct HeatmapImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

/// Linear grayscale: 0 -> 0, matrix max -> 255, rounded half up. Negative
/// values clamp to 0. An all-zero matrix gives an all-zero image.
HeatmapImage to_heatmap(const DenseMatrix& matrix);

/// Binary PGM: "P5\n<width> <height>\n255\n" followed by the pixels.
void write_pgm(std::ostream& out, const HeatmapImage& image);
void write_heatmap(const DenseMatrix& matrix, const std::string& path);

// Ensemble CSV: header r0,r1,... and one column per realization.
void write_ensemble_csv(std::ostream& out, const Ensemble& ensemble);
Ensemble read_ensemble_csv(std::istream& in, const std::string& name = "ensemble");
/// True when the first line looks like an ensemble header (r0,r1,...).
bool is_ensemble_header(const std::string& header_line);

void write_phases_csv(std::ostream& out, const Ensemble& ensemble);

void write_spectrum_csv(std::ostream& out, const std::vector<double>& mean_power);
void write_bispectrum_csv(std::ostream& out, const BispectrumEstimate& est);
void write_bicoherence_csv(std::ostream& out, const BicoherenceMap& map);
/// Matrix layout: row = ka, column = kb, empty fields outside the domain.
void write_bicoherence_matrix_csv(std::ostream& out, const BicoherenceMap& map);

struct BispectrumRow {
  std::size_t ka;
  std::size_t kb;
  Complex mean;
};
struct BicoherenceRow {
  std::size_t ka;
  std::size_t kb;
  double b2;
  bool valid;
};
std::vector<BispectrumRow> read_bispectrum_csv(std::istream& in);
std::vector<BicoherenceRow> read_bicoherence_csv(std::istream& in);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// key=value per line; blank lines and lines starting with '#' are skipped.
KeyValues read_config(std::istream& in);
void write_config(std::ostream& out, const KeyValues& values, const std::string& comment = {});

}  // namespace bispectral::io
