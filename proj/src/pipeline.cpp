#include "fiberscan/pipeline.hpp"

#include <chrono>
#include <type_traits>
#include <cmath>

#include "fiberscan/error.hpp"

namespace fiberscan {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, message);
}

void require_odd_side(int side, const char* name) {
  require(side >= 1 && side % 2 == 1, std::string(name) + " must be an odd integer >= 1");
}

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& out) : out_(out) {}

  // Runs fn, records its wall time under `stage`, and tags any library error
  // with the stage name.
  template <typename Fn>
  auto run(const char* stage, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(stage, start);
      } else {
        auto result = fn();
        record(stage, start);
        return result;
      }
    } catch (const Error& e) {
      if (!e.stage().empty()) throw;
      throw Error(e.code(), std::string(stage) + ": " + e.what(), stage);
    }
  }

 private:
  void record(const char* stage, std::chrono::steady_clock::time_point start) {
    const auto end = std::chrono::steady_clock::now();
    out_.push_back({stage, std::chrono::duration<double, std::milli>(end - start).count()});
  }

  std::vector<StageTiming>& out_;
};

}  // namespace

void DetectorConfig::validate() const {
  require_odd_side(se_close_side, "se_close_side");
  require_odd_side(se_open_side, "se_open_side");
  require_odd_side(se_dil_side, "se_dil_side");
  require(eps > 0.0 && std::isfinite(eps), "eps must be finite and > 0");
  require(smooth_sigma >= 0.0 && std::isfinite(smooth_sigma),
          "smooth_sigma must be finite and >= 0");
  require(probe_delta > 0.0 && std::isfinite(probe_delta), "probe_delta must be finite and > 0");
  require(t_low > 0.0 && std::isfinite(t_low), "t_low must be finite and > 0");
  require(t_high > 0.0 && std::isfinite(t_high), "t_high must be finite and > 0");
  require(t_low <= t_high, "t_low must not exceed t_high");
  require(gap >= 1, "gap must be >= 1");
  require(min_length >= 1, "min_length must be >= 1");
  require(min_fiber_count >= 1, "min_fiber_count must be >= 1");
  if (photo_region) {
    require(photo_region->w >= 0 && photo_region->h >= 0,
            "photo_region width and height must be >= 0");
  }
}

const char* to_string(Verdict v) {
  return v == Verdict::kAuthentic ? "AUTHENTIC" : "FAKE";
}

Verdict decide(std::size_t fiber_count, std::size_t min_fiber_count) {
  return fiber_count >= min_fiber_count ? Verdict::kAuthentic : Verdict::kFake;
}

DetectionReport run_pipeline(const RasterImage& img, const DetectorConfig& config,
                             PipelineTrace* trace) {
  config.validate();
  std::vector<StageTiming> timings;
  StageClock clock(timings);
  const GrayImage gray = clock.run("grayscale", [&] { return to_grayscale(img); });
  DetectionReport report = run_pipeline(gray, config, trace);
  timings.insert(timings.end(), report.timings.begin(), report.timings.end());
  report.timings = std::move(timings);
  return report;
}

DetectionReport run_pipeline(const GrayImage& gray, const DetectorConfig& config,
                             PipelineTrace* trace) {
  config.validate();
  DetectionReport report;
  report.width = gray.width();
  report.height = gray.height();
  report.config = config;
  StageClock clock(report.timings);

  const GrayImage i0 = clock.run("text_suppression", [&] {
    return suppress_text(gray, StructuringElement(config.se_close_side));
  });
  NormalizationTrace norm = clock.run("normalization", [&] {
    return normalize_background(i0, StructuringElement(config.se_open_side),
                                StructuringElement(config.se_dil_side), config.eps);
  });
  GrayImage ridge_input = norm.ratio;
  if (config.photo_region) {
    ridge_input = clock.run("photo_mask",
                            [&] { return mask_photo_region(norm.ratio, *config.photo_region); });
  }
  RidgeMaps ridges =
      clock.run("ridges", [&] { return detect_ridges(ridge_input, config.ridge_params()); });
  auto components =
      clock.run("components", [&] { return link_components(ridges.final_mask, config.gap); });
  report.fibers = clock.run("filter", [&] {
    return filter_components(components, static_cast<std::size_t>(config.min_length));
  });
  report.fiber_count = report.fibers.size();
  report.verdict = clock.run("decision", [&] {
    return decide(report.fiber_count, static_cast<std::size_t>(config.min_fiber_count));
  });

  if (trace) {
    trace->normalization = std::move(norm);
    trace->ridge_input = std::move(ridge_input);
    trace->ridges = std::move(ridges);
    trace->all_components = std::move(components);
  }
  return report;
}

}  // namespace fiberscan
