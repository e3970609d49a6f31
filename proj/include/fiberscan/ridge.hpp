#pragma once

#include <cstdint>
#include <vector>

#include "fiberscan/image.hpp"

namespace fiberscan {

struct GradientField {
  GrayImage gx;
  GrayImage gy;
};

/// Second derivatives; the single ixy serves both off-diagonal entries.
struct HessianField {
  GrayImage ixx;
  GrayImage ixy;
  GrayImage iyy;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Eigen-decomposition of [[a, b], [b, c]]. v_min is the unit eigenvector of
/// lambda_min with v_min.x > 0, or v_min.y >= 0 when v_min.x == 0.
struct EigenPair {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Vec2 v_min{1.0, 0.0};
};

struct RidgeParams {
  double smooth_sigma = 1.0;
  double probe_delta = 1.0;
  double t_low = 0.02;
  double t_high = 0.06;

  void validate() const;
};

/// Binary map, one byte per pixel (0 or 1), row-major.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height) : width_(width), height_(height),
      bits_(static_cast<std::size_t>(width) * height, 0) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v = true) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::size_t count() const;
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct RidgeMaps {
  GrayImage smoothed;   // ratio image after Gaussian smoothing
  GrayImage strength;   // -lambda_min at candidates, 0 elsewhere
  std::vector<Vec2> direction;  // v_min per pixel
  Mask candidates;
  Mask final_mask;
};

/// Separable Gaussian, radius ceil(3 sigma), unit-sum kernel, replicate
/// borders. sigma == 0 returns the input unchanged.
GrayImage gaussian_smooth(const GrayImage& img, double sigma);

/// 3x3 Scharr derivatives, weights (3, 10, 3) / 32. Requires >= 3x3.
GradientField scharr_gradient(const GrayImage& img);
GrayImage scharr_x(const GrayImage& img);
GrayImage scharr_y(const GrayImage& img);

/// Scharr applied twice. Requires >= 5x5.
HessianField hessian_field(const GrayImage& img);

EigenPair eig_sym2(double a, double b, double c);

/// Pixels whose smoothed brightness exceeds both probes at +-probe_delta
/// along v_min, with lambda_min < 0. The outermost two rows and columns are
/// never candidates.
RidgeMaps ridge_candidates(const GrayImage& ratio, const RidgeParams& params);

/// Thins candidates to local maxima of strength along the rounded v_min.
RidgeMaps nms(RidgeMaps maps);

/// Double-threshold with 8-connected propagation from strong pixels.
Mask hysteresis(const RidgeMaps& maps, double t_low, double t_high);

/// Full chain: smooth, Hessian, candidates, NMS, hysteresis.
RidgeMaps detect_ridges(const GrayImage& ratio, const RidgeParams& params);

/// Neighbour offset (one of the 8) closest to +-v, pointing along v.
/// Ties go to the first of E, NE, N, NW.
struct Offset {
  int dx;
  int dy;
};
Offset round_direction(Vec2 v);

}  // namespace fiberscan
