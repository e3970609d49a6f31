#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fiberscan/error.hpp"
#include "fiberscan/evaluate.hpp"
#include "fiberscan/morphology.hpp"
#include "fiberscan/pipeline.hpp"
#include "fiberscan/serialize.hpp"
#include "fiberscan/synthgen.hpp"

namespace py = pybind11;
using namespace fiberscan;

namespace {

using FloatArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

GrayImage to_gray(const FloatArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D float array (height, width)");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  return GrayImage(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

FloatArray from_gray(const GrayImage& img) {
  FloatArray out({img.height(), img.width()});
  std::copy(img.samples().begin(), img.samples().end(), out.mutable_data());
  return out;
}

RasterImage to_raster(const ByteArray& a) {
  if (a.ndim() != 2 && !(a.ndim() == 3 && (a.shape(2) == 1 || a.shape(2) == 3))) {
    throw py::value_error("expected a uint8 array of shape (h, w), (h, w, 1) or (h, w, 3)");
  }
  const int channels = a.ndim() == 2 ? 1 : static_cast<int>(a.shape(2));
  return RasterImage(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), channels,
                     std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

ByteArray from_raster(const RasterImage& img) {
  ByteArray out(std::vector<py::ssize_t>{img.height(), img.width(), img.channels()});
  std::copy(img.samples().begin(), img.samples().end(), out.mutable_data());
  return out;
}

BoolArray from_mask(const Mask& m) {
  BoolArray out({m.height(), m.width()});
  bool* dst = out.mutable_data();
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) *dst++ = m.at(x, y);
  }
  return out;
}

Mask to_mask(const BoolArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D boolean mask");
  Mask m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  const bool* src = a.data();
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) m.set(x, y, *src++);
  }
  return m;
}

DetectorConfig config_of(const std::string& json) { return json.empty() ? DetectorConfig{} : config_from_json(json); }

}  // namespace

PYBIND11_MODULE(_fiberscan, m) {
  m.doc() = "Native core of the fiberscan detector.";

  static py::exception<Error> error_type(m, "FiberscanError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  m.def("to_grayscale", [](const ByteArray& a) { return from_gray(to_grayscale(to_raster(a))); });
  m.def("dilate", [](const FloatArray& a, int side) { return from_gray(dilate(to_gray(a), StructuringElement(side))); });
  m.def("erode", [](const FloatArray& a, int side) { return from_gray(erode(to_gray(a), StructuringElement(side))); });
  m.def("opening", [](const FloatArray& a, int side) { return from_gray(opening(to_gray(a), StructuringElement(side))); });
  m.def("closing", [](const FloatArray& a, int side) { return from_gray(closing(to_gray(a), StructuringElement(side))); });

  m.def(
      "normalize_background",
      [](const FloatArray& a, int se_open, int se_dil, double eps) {
        const NormalizationTrace t =
            normalize_background(to_gray(a), StructuringElement(se_open), StructuringElement(se_dil), eps);
        py::dict d;
        d["background"] = from_gray(t.ibg);
        d["dilated"] = from_gray(t.idil);
        d["ratio"] = from_gray(t.ratio);
        return d;
      },
      py::arg("image"), py::arg("se_open") = 11, py::arg("se_dil") = 11, py::arg("eps") = 1.0 / 255.0);

  m.def(
      "detect_ridges",
      [](const FloatArray& a, double sigma, double t_low, double t_high) {
        RidgeParams p;
        p.smooth_sigma = sigma;
        p.t_low = t_low;
        p.t_high = t_high;
        const RidgeMaps maps = detect_ridges(to_gray(a), p);
        py::dict d;
        d["strength"] = from_gray(maps.strength);
        d["candidates"] = from_mask(maps.candidates);
        d["mask"] = from_mask(maps.final_mask);
        return d;
      },
      py::arg("ratio"), py::arg("sigma") = 1.0, py::arg("t_low") = 0.02, py::arg("t_high") = 0.06);

  m.def(
      "link_components",
      [](const BoolArray& a, int gap) {
        py::list out;
        for (const FiberComponent& c : link_components(to_mask(a), gap)) {
          py::list pixels;
          for (const Pixel& p : c.pixels) pixels.append(py::make_tuple(p.x, p.y));
          out.append(pixels);
        }
        return out;
      },
      py::arg("mask"), py::arg("gap") = 3);

  m.def(
      "run_pipeline_json",
      [](const ByteArray& a, const std::string& config, bool timings) {
        const RasterImage img = to_raster(a);
        DetectionReport r;
        {
          py::gil_scoped_release release;
          r = run_pipeline(img, config_of(config));
        }
        return report_to_json(r, "<array>", timings);
      },
      py::arg("image"), py::arg("config") = "", py::arg("timings") = true);

  m.def(
      "generate_page",
      [](const std::string& spec, std::uint64_t seed) {
        const SyntheticPage page = generate_page(spec.empty() ? SyntheticSpec{} : spec_from_json(spec), seed);
        return py::make_tuple(from_raster(page.image), truth_to_json(page.truth));
      },
      py::arg("spec") = "", py::arg("seed") = 0);

  m.def(
      "evaluate_json",
      [](const std::vector<py::array>& images, const std::vector<std::string>& truths,
         const std::string& config, double match_dist) {
        if (images.size() != truths.size()) throw py::value_error("images and truths differ in length");
        const DetectorConfig cfg = config_of(config);
        std::vector<DetectionReport> reports;
        std::vector<GroundTruth> gt;
        for (std::size_t i = 0; i < images.size(); ++i) {
          reports.push_back(run_pipeline(to_raster(ByteArray::ensure(images[i])), cfg));
          gt.push_back(truth_from_json(truths[i]));
        }
        return metrics_to_json(evaluate(reports, gt, match_dist));
      },
      py::arg("images"), py::arg("truths"), py::arg("config") = "", py::arg("match_dist") = kDefaultMatchDist);
}
