#include "fiberscan/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "fiberscan/error.hpp"

namespace fiberscan {

RasterImage::RasterImage(int width, int height, int channels)
    : RasterImage(width, height, channels,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                            std::max(height, 0) * std::max(channels, 0))) {}

RasterImage::RasterImage(int width, int height, int channels, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), channels_(channels), samples_(std::move(samples)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidImage, "raster dimensions must be at least 1x1");
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kInvalidImage, "raster must have 1 or 3 channels");
  }
  if (samples_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw Error(ErrorCode::kInvalidImage, "raster sample count does not match dimensions");
  }
}

GrayImage::GrayImage(int width, int height, double fill)
    : GrayImage(width, height,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                        std::max(height, 0),
                                    fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<double> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidImage, "image dimensions must be at least 1x1");
  }
  if (samples_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kInvalidImage, "image sample count does not match dimensions");
  }
}

double GrayImage::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return at(x, y);
}

Rect clip(const Rect& r, int width, int height) {
  const long x0 = std::max<long>(r.x, 0);
  const long y0 = std::max<long>(r.y, 0);
  const long x1 = std::min<long>(static_cast<long>(r.x) + r.w, width);
  const long y1 = std::min<long>(static_cast<long>(r.y) + r.h, height);
  if (r.w <= 0 || r.h <= 0 || x1 <= x0 || y1 <= y0) return Rect{0, 0, 0, 0};
  return Rect{static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x1 - x0),
              static_cast<int>(y1 - y0)};
}

GrayImage to_grayscale(const RasterImage& img) {
  GrayImage out(img.width(), img.height());
  auto dst = out.samples();
  auto src = img.samples();
  if (img.channels() == 1) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] / 255.0;
  } else {
    // 765 = 3 * 255 is exact, so equal channels v,v,v give exactly v/255.
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const int sum = src[3 * i] + src[3 * i + 1] + src[3 * i + 2];
      dst[i] = sum / 765.0;
    }
  }
  return out;
}

double sample_bilinear(const GrayImage& img, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double tx = x - x0;
  const double ty = y - y0;
  const double f00 = img.clamped(x0, y0);
  const double f10 = img.clamped(x0 + 1, y0);
  const double f01 = img.clamped(x0, y0 + 1);
  const double f11 = img.clamped(x0 + 1, y0 + 1);
  const double top = f00 + tx * (f10 - f00);
  const double bottom = f01 + tx * (f11 - f01);
  return top + ty * (bottom - top);
}

namespace {

struct AxisTap {
  int near;
  int far;
  double weight;  // weight of the far tap
};

AxisTap axis_tap(int p, double d) {
  const double whole = std::trunc(d);
  const double frac = d - whole;  // exact
  const int near = p + static_cast<int>(whole);
  const int far = frac > 0.0 ? near + 1 : (frac < 0.0 ? near - 1 : near);
  return {near, far, std::fabs(frac)};
}

}  // namespace

double sample_offset(const GrayImage& img, int px, int py, double dx, double dy) {
  const AxisTap ax = axis_tap(px, dx);
  const AxisTap ay = axis_tap(py, dy);
  const double w00 = (1.0 - ax.weight) * (1.0 - ay.weight);
  const double w10 = ax.weight * (1.0 - ay.weight);
  const double w01 = (1.0 - ax.weight) * ay.weight;
  const double w11 = ax.weight * ay.weight;
  const double cross = w10 * img.clamped(ax.far, ay.near) + w01 * img.clamped(ax.near, ay.far);
  return w00 * img.clamped(ax.near, ay.near) + cross + w11 * img.clamped(ax.far, ay.far);
}

GrayImage rotate90(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  GrayImage out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(y, w - 1 - x) = img.at(x, y);
  }
  return out;
}

GrayImage transpose(const GrayImage& img) {
  GrayImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.at(y, x) = img.at(x, y);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Netpbm

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Reads one whitespace-delimited unsigned integer, skipping '#' comments.
  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorCode::kMalformedHeader, "netpbm header: expected an integer");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) {
        throw Error(ErrorCode::kMalformedHeader, "netpbm header: value out of range");
      }
      ++pos_;
    }
    return static_cast<int>(value);
  }

  // Binary formats: exactly one whitespace byte separates maxval from data.
  void skip_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::kMalformedHeader, "netpbm header: missing separator before data");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint8_t rescale(int v, int maxval) {
  if (maxval == 255) return static_cast<std::uint8_t>(v);
  return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
}

}  // namespace

RasterImage decode_netpbm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) {
    throw Error(ErrorCode::kMalformedHeader, "netpbm header: file too short");
  }
  if (bytes[0] != 'P') {
    throw Error(ErrorCode::kUnsupportedFormat, "not a netpbm file (only PGM/PPM are supported)");
  }
  const char kind = static_cast<char>(bytes[1]);
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
    throw Error(ErrorCode::kUnsupportedFormat,
                std::string("unsupported netpbm variant P") + kind);
  }
  const bool ascii = kind == '2' || kind == '3';
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;

  HeaderReader reader(bytes);
  reader.seek(2);
  const int width = reader.next_int();
  const int height = reader.next_int();
  const int maxval = reader.next_int();
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kMalformedHeader, "netpbm header: zero image dimension");
  }
  if (maxval < 1 || maxval > 65535) {
    throw Error(ErrorCode::kMalformedHeader, "netpbm header: invalid maxval");
  }
  if (maxval > 255) {
    throw Error(ErrorCode::kUnsupportedFormat, "16-bit netpbm files are not supported");
  }

  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  std::vector<std::uint8_t> samples(count);
  if (ascii) {
    for (std::size_t i = 0; i < count; ++i) {
      int v = 0;
      try {
        v = reader.next_int();
      } catch (const Error&) {
        throw Error(ErrorCode::kMalformedHeader, "netpbm: truncated or invalid ASCII pixel data");
      }
      if (v > maxval) throw Error(ErrorCode::kMalformedHeader, "netpbm: sample exceeds maxval");
      samples[i] = rescale(v, maxval);
    }
  } else {
    reader.skip_single_space();
    if (bytes.size() - reader.pos() < count) {
      throw Error(ErrorCode::kMalformedHeader, "netpbm: truncated pixel data");
    }
    for (std::size_t i = 0; i < count; ++i) {
      const int v = bytes[reader.pos() + i];
      if (v > maxval) throw Error(ErrorCode::kMalformedHeader, "netpbm: sample exceeds maxval");
      samples[i] = rescale(v, maxval);
    }
  }
  return RasterImage(width, height, channels, std::move(samples));
}

RasterImage read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadable, "cannot open image file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kUnreadable, "cannot read image file: " + path.string());
  return decode_netpbm(bytes);
}

std::vector<std::uint8_t> encode_netpbm(const RasterImage& img) {
  const std::string header = std::string(img.channels() == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(img.width()) + " " + std::to_string(img.height()) +
                             "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.samples().begin(), img.samples().end());
  return out;
}

void write_raster(const std::filesystem::path& path, const RasterImage& img) {
  const auto bytes = encode_netpbm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kUnwritable, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kUnwritable, "write failed: " + path.string());
}

RasterImage quantize(const GrayImage& img) {
  RasterImage out(img.width(), img.height(), 1);
  auto dst = out.samples();
  auto src = img.samples();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double v = std::clamp(src[i], 0.0, 1.0);
    dst[i] = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
  }
  return out;
}

void write_gray(const std::filesystem::path& path, const GrayImage& img) {
  write_raster(path, quantize(img));
}

RasterImage draw_boxes(const RasterImage& img, std::span<const Rect> boxes) {
  RasterImage out(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y, img.channels() == 3 ? c : 0);
    }
  }
  auto paint = [&](int x, int y) {
    out.at(x, y, 0) = 255;
    out.at(x, y, 1) = 0;
    out.at(x, y, 2) = 0;
  };
  for (const Rect& box : boxes) {
    const Rect r = clip(box, img.width(), img.height());
    if (r.empty()) continue;
    for (int x = r.x; x < r.x + r.w; ++x) {
      paint(x, r.y);
      paint(x, r.y + r.h - 1);
    }
    for (int y = r.y; y < r.y + r.h; ++y) {
      paint(r.x, y);
      paint(r.x + r.w - 1, y);
    }
  }
  return out;
}

void write_overlay(const std::filesystem::path& path, const RasterImage& img,
                   std::span<const Rect> boxes) {
  write_raster(path, draw_boxes(img, boxes));
}

}  // namespace fiberscan
