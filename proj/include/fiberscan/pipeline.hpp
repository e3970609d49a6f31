#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fiberscan/components.hpp"
#include "fiberscan/image.hpp"
#include "fiberscan/morphology.hpp"
#include "fiberscan/ridge.hpp"

namespace fiberscan {

/// Every tunable of the detector. Defaults were tuned on the synthetic corpus.
struct DetectorConfig {
  int se_close_side = 5;
  int se_open_side = 11;
  int se_dil_side = 11;
  double eps = 1.0 / 255.0;
  double smooth_sigma = 1.0;
  double probe_delta = 1.0;
  double t_low = 0.02;
  double t_high = 0.06;
  int gap = 3;
  int min_length = 15;
  int min_fiber_count = 3;
  std::optional<Rect> photo_region;

  /// Throws Error(kInvalidConfig) naming the offending field.
  void validate() const;
  RidgeParams ridge_params() const {
    return {smooth_sigma, probe_delta, t_low, t_high};
  }
  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

enum class Verdict { kAuthentic, kFake };

const char* to_string(Verdict v);

/// Authentic iff fiber_count >= min_fiber_count.
Verdict decide(std::size_t fiber_count, std::size_t min_fiber_count);

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct DetectionReport {
  int width = 0;
  int height = 0;
  DetectorConfig config;
  std::vector<FiberComponent> fibers;
  std::size_t fiber_count = 0;
  Verdict verdict = Verdict::kFake;
  std::vector<StageTiming> timings;
};

/// Intermediate images, filled only when requested (debug dumps, tests).
struct PipelineTrace {
  NormalizationTrace normalization;
  GrayImage ridge_input;  // ratio after optional photo masking
  RidgeMaps ridges;
  std::vector<FiberComponent> all_components;
};

/// grayscale -> text suppression -> background normalization -> photo mask
/// -> ridges -> linking -> length filter -> verdict. Errors are rethrown
/// with the failing stage recorded in Error::stage().
DetectionReport run_pipeline(const RasterImage& img, const DetectorConfig& config,
                             PipelineTrace* trace = nullptr);
DetectionReport run_pipeline(const GrayImage& gray, const DetectorConfig& config,
                             PipelineTrace* trace = nullptr);

}  // namespace fiberscan
