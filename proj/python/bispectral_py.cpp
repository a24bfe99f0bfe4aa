#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "bispectral/bispectrum.hpp"
#include "bispectral/error.hpp"
#include "bispectral/spectral.hpp"
#include "bispectral/synth.hpp"

namespace py = pybind11;
using namespace bispectral;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

TimeSeries to_series(const RealArray& x) {
  if (x.ndim() != 1) throw py::value_error("expected a 1-d array");
  return TimeSeries(std::vector<double>(x.data(), x.data() + x.size()));
}

// Rows of a 2-d array (segments x samples).
std::vector<TimeSeries> to_segments(const RealArray& x) {
  if (x.ndim() != 2) throw py::value_error("expected a 2-d array of shape (segments, samples)");
  const auto rows = static_cast<std::size_t>(x.shape(0));
  const auto cols = static_cast<std::size_t>(x.shape(1));
  std::vector<TimeSeries> out;
  out.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    out.emplace_back(std::vector<double>(x.data() + r * cols, x.data() + (r + 1) * cols));
  }
  return out;
}

ComplexArray to_array(const Spectrum& s) {
  ComplexArray out(static_cast<py::ssize_t>(s.n()));
  std::copy(s.bins().begin(), s.bins().end(), out.mutable_data());
  return out;
}

RealArray to_array(std::span<const double> v) {
  RealArray out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Spectrum to_spectrum(const ComplexArray& f) {
  if (f.ndim() != 1) throw py::value_error("expected a 1-d complex array");
  return Spectrum(std::vector<Complex>(f.data(), f.data() + f.size()));
}

py::list cell_list(const PrincipalDomain& d) {
  py::list out;
  for (const Cell& c : d.cells()) out.append(py::make_tuple(c.ka, c.kb));
  return out;
}

py::dict peak_dict(const Peak& p) {
  py::dict d;
  d["ka"] = p.ka;
  d["kb"] = p.kb;
  d["b2"] = p.b2;
  d["mean_magnitude"] = p.mean_magnitude;
  d["biphase"] = p.biphase;
  d["p_value"] = p.p_value ? py::cast(*p.p_value) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_bispectral, m) {
  m.doc() = "Bispectrum and bicoherence estimation";

  static py::exception<Error> error(m, "BispectralError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("dft", [](const RealArray& x) { return to_array(dft(to_series(x))); }, py::arg("x"),
        "Radix-2 forward transform (unnormalized). Length must be a power of two.");
  m.def("dft_reference", [](const RealArray& x) { return to_array(dft_reference(to_series(x))); },
        py::arg("x"), "Direct O(N^2) forward transform for any length >= 2.");
  m.def("inverse_dft",
        [](const ComplexArray& f) {
          const TimeSeries t = inverse_dft(to_spectrum(f));
          return to_array(t.values());
        },
        py::arg("spectrum"), "Inverse transform carrying the 1/N factor; returns the real part.");
  m.def("power_spectrum",
        [](const ComplexArray& f) { return to_array(power_spectrum(to_spectrum(f)).power); },
        py::arg("spectrum"));

  m.def(
      "generate",
      [](std::size_t n, std::size_t count, int ka, int kb, const std::string& mode, double noise,
         std::uint64_t seed, double amplitude, std::optional<int> kgamma) {
        SynthParams p;
        p.n = n;
        p.m = count;
        p.k_alpha = ka;
        p.k_beta = kb;
        p.k_gamma_explicit = kgamma;
        p.coupling = parse_coupling(mode);
        p.noise_amplitude = noise;
        p.seed = seed;
        p.amplitude = amplitude;
        const Ensemble e = generate(p);
        RealArray out({static_cast<py::ssize_t>(count), static_cast<py::ssize_t>(n)});
        double* dst = out.mutable_data();
        for (const TimeSeries& r : e.realizations) dst = std::copy(r.values().begin(), r.values().end(), dst);
        return out;
      },
      py::arg("n") = 256, py::arg("m") = 64, py::arg("ka") = 5, py::arg("kb") = 9,
      py::arg("mode") = "coupled", py::arg("noise") = 0.05, py::arg("seed") = 42,
      py::arg("amplitude") = 1.0, py::arg("kgamma") = py::none(),
      "Three-cosine ensemble of shape (m, n).");

  py::class_<BispectrumEstimate>(m, "BispectrumEstimate")
      .def_property_readonly("n", &BispectrumEstimate::n)
      .def_property_readonly("m", &BispectrumEstimate::m)
      .def_property_readonly("cells", [](const BispectrumEstimate& e) { return cell_list(e.domain()); })
      .def("mean", &BispectrumEstimate::mean, py::arg("ka"), py::arg("kb"))
      .def("acc", py::overload_cast<std::size_t, std::size_t>(&BispectrumEstimate::acc, py::const_),
           py::arg("ka"), py::arg("kb"));

  py::class_<BicoherenceMap>(m, "BicoherenceMap")
      .def_property_readonly("cells", [](const BicoherenceMap& b) { return cell_list(b.domain); })
      .def_property_readonly("b2", [](const BicoherenceMap& b) { return to_array(b.b2); })
      .def_property_readonly("valid",
                             [](const BicoherenceMap& b) {
                               py::array_t<bool> out(static_cast<py::ssize_t>(b.valid.size()));
                               std::copy(b.valid.begin(), b.valid.end(), out.mutable_data());
                               return out;
                             })
      .def("at", &BicoherenceMap::at, py::arg("ka"), py::arg("kb"))
      .def("is_valid", &BicoherenceMap::is_valid, py::arg("ka"), py::arg("kb"));

  m.def("bispectrum",
        [](const RealArray& segments) {
          const auto segs = to_segments(segments);
          return bispectrum(std::span<const TimeSeries>(segs));
        },
        py::arg("segments"), "Accumulate the bispectrum over the rows of a 2-d array.");
  m.def("bicoherence", &bicoherence, py::arg("estimate"), py::arg("power_floor") = kDefaultPowerFloor);
  m.def("biphase", &biphase, py::arg("estimate"), py::arg("ka"), py::arg("kb"));
  m.def("coupling_index", &coupling_index, py::arg("map"));
  m.def(
      "detect_peaks",
      [](const BicoherenceMap& map, const BispectrumEstimate& est, double threshold) {
        py::list out;
        for (const Peak& p : detect_peaks(map, est, threshold).peaks) out.append(peak_dict(p));
        return out;
      },
      py::arg("map"), py::arg("estimate"), py::arg("threshold") = kDefaultThreshold);
  m.def(
      "surrogate_test",
      [](const RealArray& segments, std::pair<std::size_t, std::size_t> target, std::size_t count,
         std::uint64_t seed) {
        const auto segs = to_segments(segments);
        const SurrogateResult r =
            surrogate_test(std::span<const TimeSeries>(segs), {target.first, target.second}, count, seed);
        py::dict d;
        d["target"] = py::make_tuple(r.target.ka, r.target.kb);
        d["observed_b2"] = r.observed_b2;
        d["surrogate_b2"] = to_array(r.surrogate_b2);
        d["p_value"] = r.p_value;
        return d;
      },
      py::arg("segments"), py::arg("target"), py::arg("n_surrogates") = kDefaultSurrogates,
      py::arg("seed") = 0);
}
