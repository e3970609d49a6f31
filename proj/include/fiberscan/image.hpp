#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace fiberscan {

/// 8-bit raster as it comes off the scanner (or out of a PPM/PGM file).
/// Samples are row-major and channel-interleaved; channels is 1 or 3.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, int channels);
  RasterImage(int width, int height, int channels, std::vector<std::uint8_t> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return samples_.empty(); }

  std::uint8_t at(int x, int y, int c = 0) const {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<const std::uint8_t> samples() const noexcept { return samples_; }
  std::span<std::uint8_t> samples() noexcept { return samples_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> samples_;
};

/// Real-valued single-channel image. Loaded images live in [0,1]; derived
/// images (ratios, curvature) may exceed 1.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  double at(int x, int y) const { return samples_[static_cast<std::size_t>(y) * width_ + x]; }
  double& at(int x, int y) { return samples_[static_cast<std::size_t>(y) * width_ + x]; }

  /// Replicate-border access: coordinates are clamped into the image.
  double clamped(int x, int y) const;

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<double> samples() noexcept { return samples_; }
  const double* row(int y) const { return samples_.data() + static_cast<std::size_t>(y) * width_; }
  double* row(int y) { return samples_.data() + static_cast<std::size_t>(y) * width_; }

  bool same_shape(const GrayImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> samples_;
};

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool empty() const noexcept { return w <= 0 || h <= 0; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Intersection of `r` with the [0,width) x [0,height) image domain.
Rect clip(const Rect& r, int width, int height);

/// Channel average scaled to [0,1].
GrayImage to_grayscale(const RasterImage& img);

/// Bilinear interpolation at a real-valued position with replicate borders.
double sample_bilinear(const GrayImage& img, double x, double y);

/// Bilinear sample at pixel (px, py) displaced by (dx, dy). Same value as
/// sample_bilinear(img, px + dx, py + dy), but the weights are formed from the
/// magnitude of the displacement so that mirrored or transposed displacements
/// give bit-identical results.
double sample_offset(const GrayImage& img, int px, int py, double dx, double dy);

/// Counter-clockwise quarter turn: out(y, W-1-x) = in(x, y).
GrayImage rotate90(const GrayImage& img);
GrayImage transpose(const GrayImage& img);

// Netpbm I/O. Reads P2/P3/P5/P6 (maxval <= 255); writes binary P5/P6.
RasterImage read_image(const std::filesystem::path& path);
RasterImage decode_netpbm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_netpbm(const RasterImage& img);
void write_raster(const std::filesystem::path& path, const RasterImage& img);

/// Quantizes clamp(v,0,1)*255 with round-half-up.
RasterImage quantize(const GrayImage& img);
void write_gray(const std::filesystem::path& path, const GrayImage& img);

/// Draws 1-px pure red outlines of `boxes` over `img` (promoted to RGB).
RasterImage draw_boxes(const RasterImage& img, std::span<const Rect> boxes);
void write_overlay(const std::filesystem::path& path, const RasterImage& img,
                   std::span<const Rect> boxes);

}  // namespace fiberscan
