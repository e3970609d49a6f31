#include "fiberscan/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "fiberscan/error.hpp"

// Every filter here is written so that mirroring or transposing the input
// mirrors/transposes the output bit for bit: symmetric taps are summed in
// pairs (a + b is commutative in IEEE arithmetic) and the two orders of a
// separable 2-D filter are averaged where they would otherwise differ.

namespace fiberscan {

void RidgeParams::validate() const {
  if (!(smooth_sigma >= 0.0) || !std::isfinite(smooth_sigma)) {
    throw Error(ErrorCode::kInvalidConfig, "smooth_sigma must be finite and >= 0");
  }
  if (!(probe_delta > 0.0) || !std::isfinite(probe_delta)) {
    throw Error(ErrorCode::kInvalidConfig, "probe_delta must be finite and > 0");
  }
  if (!(t_low > 0.0) || !(t_high > 0.0) || !std::isfinite(t_high)) {
    throw Error(ErrorCode::kInvalidConfig, "ridge thresholds must be positive");
  }
  if (t_low > t_high) {
    throw Error(ErrorCode::kInvalidConfig, "t_low must not exceed t_high");
  }
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

// out(x) = c0 * in(x) + sum_j c[j] * (in(x-j) + in(x+j)) along rows.
GrayImage symmetric_rows(const GrayImage& img, const std::vector<double>& taps) {
  const int w = img.width();
  const int r = static_cast<int>(taps.size()) - 1;
  GrayImage out(w, img.height());
  std::vector<double> padded(w + 2 * r);
  for (int y = 0; y < img.height(); ++y) {
    const double* in = img.row(y);
    for (int i = 0; i < w + 2 * r; ++i) padded[i] = in[std::clamp(i - r, 0, w - 1)];
    double* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      const double* c = padded.data() + x + r;
      double acc = taps[0] * c[0];
      for (int j = 1; j <= r; ++j) acc += taps[j] * (c[-j] + c[j]);
      dst[x] = acc;
    }
  }
  return out;
}

// Same arithmetic as symmetric_rows, along columns.
GrayImage symmetric_cols(const GrayImage& img, const std::vector<double>& taps) {
  const int w = img.width();
  const int h = img.height();
  const int r = static_cast<int>(taps.size()) - 1;
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    double* dst = out.row(y);
    const double* center = img.row(y);
    for (int x = 0; x < w; ++x) dst[x] = taps[0] * center[x];
    for (int j = 1; j <= r; ++j) {
      const double* up = img.row(std::max(y - j, 0));
      const double* down = img.row(std::min(y + j, h - 1));
      for (int x = 0; x < w; ++x) dst[x] += taps[j] * (up[x] + down[x]);
    }
  }
  return out;
}

// (in(x+1) - in(x-1)) * scale along rows / columns.
GrayImage central_diff_rows(const GrayImage& img, double scale) {
  const int w = img.width();
  GrayImage out(w, img.height());
  for (int y = 0; y < img.height(); ++y) {
    const double* in = img.row(y);
    double* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      dst[x] = (in[std::min(x + 1, w - 1)] - in[std::max(x - 1, 0)]) * scale;
    }
  }
  return out;
}

GrayImage central_diff_cols(const GrayImage& img, double scale) {
  const int w = img.width();
  const int h = img.height();
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const double* up = img.row(std::max(y - 1, 0));
    const double* down = img.row(std::min(y + 1, h - 1));
    double* dst = out.row(y);
    for (int x = 0; x < w; ++x) dst[x] = (down[x] - up[x]) * scale;
  }
  return out;
}

const std::vector<double> kScharrSmooth = {10.0, 3.0};
constexpr double kScharrScale = 1.0 / 32.0;

void require_size(const GrayImage& img, int min_side, const char* what) {
  if (img.width() < min_side || img.height() < min_side) {
    throw Error(ErrorCode::kTooSmall, std::string(what) + " needs an image of at least " +
                                          std::to_string(min_side) + "x" +
                                          std::to_string(min_side) + " pixels, got " +
                                          std::to_string(img.width()) + "x" +
                                          std::to_string(img.height()));
  }
}

GrayImage average(const GrayImage& a, const GrayImage& b) {
  GrayImage out(a.width(), a.height());
  auto pa = a.samples();
  auto pb = b.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = 0.5 * (pa[i] + pb[i]);
  return out;
}

}  // namespace

GrayImage gaussian_smooth(const GrayImage& img, double sigma) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "sigma must be >= 0");
  if (sigma == 0.0) return img;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(radius + 1);
  for (int j = 0; j <= radius; ++j) taps[j] = std::exp(-(j * j) / (2.0 * sigma * sigma));
  double sum = taps[0];
  for (int j = 1; j <= radius; ++j) sum += 2.0 * taps[j];
  for (double& t : taps) t /= sum;

  const GrayImage xy = symmetric_cols(symmetric_rows(img, taps), taps);
  const GrayImage yx = symmetric_rows(symmetric_cols(img, taps), taps);
  return average(xy, yx);
}

GrayImage scharr_x(const GrayImage& img) {
  require_size(img, 3, "Scharr gradient");
  return central_diff_rows(symmetric_cols(img, kScharrSmooth), kScharrScale);
}

GrayImage scharr_y(const GrayImage& img) {
  require_size(img, 3, "Scharr gradient");
  return central_diff_cols(symmetric_rows(img, kScharrSmooth), kScharrScale);
}

GradientField scharr_gradient(const GrayImage& img) {
  return {scharr_x(img), scharr_y(img)};
}

HessianField hessian_field(const GrayImage& img) {
  require_size(img, 5, "Hessian");
  const GradientField g = scharr_gradient(img);
  HessianField h;
  h.ixx = scharr_x(g.gx);
  h.iyy = scharr_y(g.gy);
  // d/dy d/dx and d/dx d/dy agree away from the border; averaging them keeps
  // the field exactly symmetric under transposition.
  h.ixy = average(scharr_y(g.gx), scharr_x(g.gy));
  return h;
}

EigenPair eig_sym2(double a, double b, double c) {
  const double diff = a - c;
  const double disc = std::sqrt(diff * diff + 4.0 * (b * b));
  EigenPair e;
  e.lambda_min = 0.5 * ((a + c) - disc);
  e.lambda_max = 0.5 * ((a + c) + disc);

  const Vec2 v1{b, e.lambda_min - a};
  const Vec2 v2{e.lambda_min - c, b};
  const double n1 = b * b + v1.y * v1.y;
  const double n2 = b * b + v2.x * v2.x;
  Vec2 v = n1 >= n2 ? v1 : v2;
  const double n = std::max(n1, n2);
  if (!(n > 0.0)) {
    e.v_min = {1.0, 0.0};
    return e;
  }
  const double len = std::sqrt(n);
  v.x /= len;
  v.y /= len;
  if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) {
    v.x = -v.x;
    v.y = -v.y;
  }
  // -0.0 would break the sign convention check downstream.
  if (v.x == 0.0) v.x = 0.0;
  if (v.y == 0.0) v.y = 0.0;
  e.v_min = v;
  return e;
}

Offset round_direction(Vec2 v) {
  static constexpr Offset kOffsets[4] = {{1, 0}, {1, -1}, {0, -1}, {-1, -1}};
  double scores[4];
  double dots[4];
  dots[0] = v.x;
  dots[1] = v.x - v.y;
  dots[2] = -v.y;
  dots[3] = -v.x - v.y;
  scores[0] = std::fabs(dots[0]);
  scores[1] = std::fabs(dots[1]) * M_SQRT1_2;
  scores[2] = std::fabs(dots[2]);
  scores[3] = std::fabs(dots[3]) * M_SQRT1_2;
  int best = 0;
  for (int i = 1; i < 4; ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  Offset o = kOffsets[best];
  if (dots[best] < 0.0) {
    o.dx = -o.dx;
    o.dy = -o.dy;
  }
  return o;
}

RidgeMaps ridge_candidates(const GrayImage& ratio, const RidgeParams& params) {
  params.validate();
  RidgeMaps maps;
  maps.smoothed = gaussian_smooth(ratio, params.smooth_sigma);
  const HessianField h = hessian_field(maps.smoothed);

  const int w = ratio.width();
  const int ht = ratio.height();
  maps.strength = GrayImage(w, ht);
  maps.direction.assign(static_cast<std::size_t>(w) * ht, Vec2{1.0, 0.0});
  maps.candidates = Mask(w, ht);
  maps.final_mask = Mask(w, ht);

  const double delta = params.probe_delta;
  const GrayImage& s = maps.smoothed;
  for (int y = 0; y < ht; ++y) {
    for (int x = 0; x < w; ++x) {
      const EigenPair e = eig_sym2(h.ixx.at(x, y), h.ixy.at(x, y), h.iyy.at(x, y));
      maps.direction[static_cast<std::size_t>(y) * w + x] = e.v_min;
      if (x < 2 || y < 2 || x >= w - 2 || y >= ht - 2) continue;
      if (!(e.lambda_min < 0.0)) continue;
      const double dx = delta * e.v_min.x;
      const double dy = delta * e.v_min.y;
      const double center = s.at(x, y);
      if (!(center > sample_offset(s, x, y, dx, dy))) continue;
      if (!(center > sample_offset(s, x, y, -dx, -dy))) continue;
      maps.candidates.set(x, y);
      maps.strength.at(x, y) = -e.lambda_min;
    }
  }
  return maps;
}

RidgeMaps nms(RidgeMaps maps) {
  const int w = maps.strength.width();
  const int h = maps.strength.height();
  const GrayImage& s = maps.strength;
  const auto strength_at = [&](int x, int y) {
    return (x < 0 || y < 0 || x >= w || y >= h) ? 0.0 : s.at(x, y);
  };
  Mask kept(w, h);
  GrayImage thinned(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!maps.candidates.at(x, y)) continue;
      const Offset r = round_direction(maps.direction[static_cast<std::size_t>(y) * w + x]);
      const double here = s.at(x, y);
      if (here >= strength_at(x + r.dx, y + r.dy) && here > strength_at(x - r.dx, y - r.dy)) {
        kept.set(x, y);
        thinned.at(x, y) = here;
      }
    }
  }
  maps.candidates = std::move(kept);
  maps.strength = std::move(thinned);
  return maps;
}

Mask hysteresis(const RidgeMaps& maps, double t_low, double t_high) {
  if (t_low > t_high) throw Error(ErrorCode::kInvalidConfig, "t_low must not exceed t_high");
  const int w = maps.strength.width();
  const int h = maps.strength.height();
  const auto weak = [&](int x, int y) {
    return maps.candidates.at(x, y) && maps.strength.at(x, y) >= t_low;
  };
  Mask out(w, h);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (out.at(x, y) || !maps.candidates.at(x, y) || !(maps.strength.at(x, y) >= t_high)) {
        continue;
      }
      out.set(x, y);
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (!out.in_bounds(nx, ny) || out.at(nx, ny) || !weak(nx, ny)) continue;
            out.set(nx, ny);
            stack.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  return out;
}

RidgeMaps detect_ridges(const GrayImage& ratio, const RidgeParams& params) {
  RidgeMaps maps = nms(ridge_candidates(ratio, params));
  maps.final_mask = hysteresis(maps, params.t_low, params.t_high);
  return maps;
}

}  // namespace fiberscan
