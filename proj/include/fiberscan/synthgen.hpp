#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "fiberscan/components.hpp"
#include "fiberscan/image.hpp"

namespace fiberscan {

/// xoshiro256** seeded through splitmix64. The exact algorithm is part of
/// the corpus format: the same seed must give the same page everywhere.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi], by rejection (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal, Marsaglia polar method (no cached second value).
  double normal();

 private:
  std::array<std::uint64_t, 4> s_;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct PhotoPatch {
  Rect region;
  double intensity = 0.85;
};

/// Appearance parameters of one synthetic UV page. Intensities are in the
/// grayscale (channel-average) domain.
struct SyntheticSpec {
  int width = 600;
  int height = 800;
  double background_base = 0.2;               // at the page center
  std::array<double, 2> background_gradient{1.5e-4, 1.0e-4};  // per pixel, x and y
  double noise_sigma = 0.01;
  int fiber_count = 12;
  std::array<double, 2> fiber_length_range{30.0, 80.0};
  std::array<double, 2> fiber_amplitude_range{0.15, 0.45};
  double along_fiber_modulation = 0.5;        // depth in [0, 1]
  int text_blocks = 4;
  std::optional<PhotoPatch> photo_patch;
  bool model_page = false;

  /// Throws Error(kInvalidSpec).
  void validate() const;
};

struct TruthFiber {
  std::vector<Point2> points;
  double amplitude = 0.0;
  friend bool operator==(const TruthFiber&, const TruthFiber&) = default;
};

struct GroundTruth {
  std::uint64_t seed = 0;
  bool model_page = false;
  std::vector<TruthFiber> fibers;
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct SyntheticPage {
  RasterImage image;
  GroundTruth truth;
  GrayImage background;  // page background before text, fibers and noise
  GrayImage clean;       // full intensity before noise and quantization
};

/// Cross-section standard deviation of a rendered fiber, in pixels.
inline constexpr double kFiberSigma = 0.8;
/// Along-fiber brightness varies in [1 - kModulationScale * depth, 1] x amplitude.
inline constexpr double kModulationScale = 0.35;

SyntheticPage generate_page(const SyntheticSpec& spec, std::uint64_t seed);

/// Digital centerline of a polyline: one pixel per step along the major
/// axis of every segment, deduplicated, in drawing order.
std::vector<Pixel> rasterize_polyline(const std::vector<Point2>& points);

double polyline_length(const std::vector<Point2>& points);

/// Distance from p to the segment [a, b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);

/// Writes page_NNNN.ppm / page_NNNN.json pairs: authentic pages first, then
/// model pages; page i uses seed + i.
void generate_corpus(const std::filesystem::path& dir, int n_authentic, int n_model,
                     const SyntheticSpec& base_spec, std::uint64_t seed);

/// Per-page spec used by generate_corpus for page `index`.
SyntheticSpec corpus_page_spec(const SyntheticSpec& base_spec, bool model_page,
                               std::uint64_t page_seed);

}  // namespace fiberscan
