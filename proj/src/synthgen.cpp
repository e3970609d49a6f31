#include "fiberscan/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "fiberscan/error.hpp"
#include "fiberscan/serialize.hpp"

namespace fiberscan {

// ---------------------------------------------------------------------------
// RNG

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::int64_t Xoshiro256::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(next());
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % range);
}

double Xoshiro256::normal() {
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

// ---------------------------------------------------------------------------
// Geometry helpers

double polyline_length(const std::vector<Point2>& points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    total += std::hypot(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y);
  }
  return total;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

std::vector<Pixel> rasterize_polyline(const std::vector<Point2>& points) {
  std::vector<Pixel> out;
  const auto push = [&](int x, int y) {
    if (out.empty() || out.back().x != x || out.back().y != y) out.push_back({x, y});
  };
  const auto round_half_up = [](double v) { return static_cast<int>(std::floor(v + 0.5)); };
  if (points.size() == 1) push(round_half_up(points[0].x), round_half_up(points[0].y));
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Point2 a = points[i - 1];
    const Point2 b = points[i];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    if (std::fabs(dx) >= std::fabs(dy)) {
      if (dx == 0.0) {
        push(round_half_up(a.x), round_half_up(a.y));
        continue;
      }
      const int x0 = round_half_up(a.x);
      const int x1 = round_half_up(b.x);
      const int step = x1 >= x0 ? 1 : -1;
      for (int x = x0;; x += step) {
        const double t = std::clamp((x - a.x) / dx, 0.0, 1.0);
        push(x, round_half_up(a.y + t * dy));
        if (x == x1) break;
      }
    } else {
      const int y0 = round_half_up(a.y);
      const int y1 = round_half_up(b.y);
      const int step = y1 >= y0 ? 1 : -1;
      for (int y = y0;; y += step) {
        const double t = std::clamp((y - a.y) / dy, 0.0, 1.0);
        push(round_half_up(a.x + t * dx), y);
        if (y == y1) break;
      }
    }
  }
  // Consecutive segments can revisit a pixel at a joint.
  std::vector<Pixel> unique;
  unique.reserve(out.size());
  for (const Pixel& p : out) {
    if (std::find(unique.begin(), unique.end(), p) == unique.end()) unique.push_back(p);
  }
  return unique;
}

// ---------------------------------------------------------------------------
// Spec

namespace {

constexpr int kMargin = 4;

void check(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kInvalidSpec, message);
}

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

void SyntheticSpec::validate() const {
  check(width >= 16 && height >= 16, "page must be at least 16x16 pixels");
  check(in_unit(background_base), "background_base must lie in [0, 1]");
  check(std::isfinite(background_gradient[0]) && std::isfinite(background_gradient[1]),
        "background_gradient must be finite");
  check(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "noise_sigma must be >= 0");
  check(fiber_count >= 0, "fiber_count must be >= 0");
  check(!model_page || fiber_count == 0, "a model page carries no fibers (fiber_count must be 0)");
  check(std::isfinite(fiber_length_range[0]) && fiber_length_range[0] > 0.0 &&
            fiber_length_range[0] <= fiber_length_range[1],
        "fiber_length_range must be a non-empty positive range");
  check(fiber_length_range[1] <= std::min(width, height) - 2 * kMargin,
        "fiber_length_range exceeds the page size");
  check(in_unit(fiber_amplitude_range[0]) && in_unit(fiber_amplitude_range[1]) &&
            fiber_amplitude_range[0] <= fiber_amplitude_range[1],
        "fiber_amplitude_range must be a non-empty range within [0, 1]");
  check(in_unit(along_fiber_modulation), "along_fiber_modulation must lie in [0, 1]");
  check(text_blocks >= 0, "text_blocks must be >= 0");
  if (photo_patch) {
    check(in_unit(photo_patch->intensity), "photo intensity must lie in [0, 1]");
    check(photo_patch->region.w >= 0 && photo_patch->region.h >= 0,
          "photo region extent must be >= 0");
  }
}

// ---------------------------------------------------------------------------
// Page rendering

namespace {

// Channel weights; each triple averages to exactly 1 so the channel mean of
// a rendered pixel is its grayscale intensity.
constexpr std::array<std::array<double, 3>, 3> kPaperHues = {{
    {0.85, 0.95, 1.20},  // bluish
    {1.00, 1.00, 1.00},  // neutral
    {0.90, 1.15, 0.95},  // greenish
}};
constexpr std::array<std::array<double, 3>, 2> kFiberHues = {{
    {1.25, 0.95, 0.80},  // red-orange
    {0.90, 1.25, 0.85},  // yellow-green
}};
constexpr double kTextDarkness = 0.3;

struct FiberDraw {
  TruthFiber truth;
  int hue = 0;
  double period = 20.0;
  double phase = 0.0;
};

FiberDraw make_fiber(const SyntheticSpec& spec, Xoshiro256& rng) {
  FiberDraw f;
  const int segments = static_cast<int>(rng.uniform_int(3, 7));
  const double length = rng.uniform(spec.fiber_length_range[0], spec.fiber_length_range[1]);
  const double step = length / segments;
  const double max_turn = std::numbers::pi / 6.0;
  double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);

  std::vector<Point2> pts{{0.0, 0.0}};
  for (int i = 0; i < segments; ++i) {
    if (i > 0) heading += rng.uniform(-max_turn, max_turn);
    const Point2 last = pts.back();
    pts.push_back({last.x + step * std::cos(heading), last.y + step * std::sin(heading)});
  }
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const Point2& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double lo_x = kMargin - min_x;
  const double hi_x = spec.width - 1 - kMargin - max_x;
  const double lo_y = kMargin - min_y;
  const double hi_y = spec.height - 1 - kMargin - max_y;
  const double tx = rng.uniform(lo_x, std::max(lo_x, hi_x));
  const double ty = rng.uniform(lo_y, std::max(lo_y, hi_y));
  for (Point2& p : pts) {
    p.x += tx;
    p.y += ty;
  }
  f.truth.points = std::move(pts);
  f.truth.amplitude = rng.uniform(spec.fiber_amplitude_range[0], spec.fiber_amplitude_range[1]);
  f.hue = static_cast<int>(rng.uniform_int(0, 1));
  f.period = rng.uniform(15.0, 40.0);
  f.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return f;
}

// Glyph strokes sit on an even lattice relative to the block origin, so every
// 2x2 window inside a block contains a background pixel.
void draw_text_block(std::vector<std::uint8_t>& ink, int width, int height, Xoshiro256& rng) {
  const int lines = static_cast<int>(rng.uniform_int(1, 3));
  const int glyphs = static_cast<int>(rng.uniform_int(8, 20));
  const int block_w = glyphs * 6;
  const int block_h = lines * 12;
  const int x_max = width - kMargin - block_w;
  const int y_max = height - kMargin - block_h;
  if (x_max < kMargin || y_max < kMargin) return;
  const int bx = 2 * static_cast<int>(rng.uniform_int(kMargin / 2, x_max / 2));
  const int by = 2 * static_cast<int>(rng.uniform_int(kMargin / 2, y_max / 2));
  const auto mark = [&](int x, int y) {
    if (x >= 0 && y >= 0 && x < width && y < height) {
      ink[static_cast<std::size_t>(y) * width + x] = 1;
    }
  };
  for (int line = 0; line < lines; ++line) {
    for (int g = 0; g < glyphs; ++g) {
      if (rng.uniform() < 0.12) continue;  // word space
      const int gx = bx + 6 * g;
      const int gy = by + 12 * line;
      const int strokes = static_cast<int>(rng.uniform_int(3, 5));
      for (int s = 0; s < strokes; ++s) {
        if (rng.uniform() < 0.5) {
          const int row = 2 * static_cast<int>(rng.uniform_int(0, 3));
          const bool half = rng.uniform() < 0.3;
          const int x0 = half ? 2 * static_cast<int>(rng.uniform_int(0, 1)) : 0;
          const int x1 = half ? x0 + 2 : 4;
          for (int x = x0; x <= x1; ++x) mark(gx + x, gy + row);
        } else {
          const int col = 2 * static_cast<int>(rng.uniform_int(0, 2));
          const bool half = rng.uniform() < 0.3;
          const int y0 = half ? 2 * static_cast<int>(rng.uniform_int(0, 2)) : 0;
          const int y1 = half ? y0 + 2 : 6;
          for (int y = y0; y <= y1; ++y) mark(gx + col, gy + y);
        }
      }
    }
  }
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v * 255.0 + 0.5), 0.0, 255.0));
}

}  // namespace

SyntheticPage generate_page(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Xoshiro256 rng(seed);
  const int w = spec.width;
  const int h = spec.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  SyntheticPage page;
  page.truth.seed = seed;
  page.truth.model_page = spec.model_page;

  const auto& paper = kPaperHues[static_cast<std::size_t>(rng.uniform_int(0, 2))];

  page.background = GrayImage(w, h);
  const double cx = 0.5 * (w - 1);
  const double cy = 0.5 * (h - 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = spec.background_base + spec.background_gradient[0] * (x - cx) +
                       spec.background_gradient[1] * (y - cy);
      page.background.at(x, y) = std::clamp(v, 0.0, 1.0);
    }
  }

  std::vector<FiberDraw> fibers;
  fibers.reserve(spec.fiber_count);
  for (int i = 0; i < spec.fiber_count; ++i) fibers.push_back(make_fiber(spec, rng));

  std::vector<std::uint8_t> ink(n, 0);
  for (int i = 0; i < spec.text_blocks; ++i) draw_text_block(ink, w, h, rng);

  // Fiber layer: brightest fiber wins where fibers overlap.
  std::vector<double> glow(n, 0.0);
  std::vector<std::int8_t> glow_hue(n, -1);
  const int reach = static_cast<int>(std::ceil(3.0 * kFiberSigma)) + 1;
  const double depth = kModulationScale * spec.along_fiber_modulation;
  for (const FiberDraw& f : fibers) {
    const auto& pts = f.truth.points;
    double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
    for (const Point2& p : pts) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x)) - reach);
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(max_x)) + reach);
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y)) - reach);
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(max_y)) + reach);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        // Nearest point on the polyline and its arc-length position.
        double best_d = 1e300;
        double best_s = 0.0;
        double s_start = 0.0;
        for (std::size_t k = 1; k < pts.size(); ++k) {
          const Point2 a = pts[k - 1];
          const Point2 b = pts[k];
          const double vx = b.x - a.x;
          const double vy = b.y - a.y;
          const double len2 = vx * vx + vy * vy;
          const double t =
              len2 > 0.0 ? std::clamp(((x - a.x) * vx + (y - a.y) * vy) / len2, 0.0, 1.0) : 0.0;
          const double d = std::hypot(x - (a.x + t * vx), y - (a.y + t * vy));
          const double seg_len = std::sqrt(len2);
          if (d < best_d) {
            best_d = d;
            best_s = s_start + t * seg_len;
          }
          s_start += seg_len;
        }
        if (best_d > reach) continue;
        const double modulation =
            1.0 - depth * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * best_s / f.period + f.phase));
        const double value = f.truth.amplitude * modulation *
                             std::exp(-(best_d * best_d) / (2.0 * kFiberSigma * kFiberSigma));
        const std::size_t idx = static_cast<std::size_t>(y) * w + x;
        if (value > glow[idx]) {
          glow[idx] = value;
          glow_hue[idx] = static_cast<std::int8_t>(f.hue);
        }
      }
    }
  }

  std::optional<Rect> photo;
  if (spec.photo_patch) photo = clip(spec.photo_patch->region, w, h);
  const auto in_photo = [&](int x, int y) {
    return photo && !photo->empty() && x >= photo->x && x < photo->x + photo->w && y >= photo->y &&
           y < photo->y + photo->h;
  };

  page.clean = GrayImage(w, h);
  std::vector<std::array<double, 3>> color(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      const double bg = page.background.at(x, y);
      double base = bg;
      std::array<double, 3> rgb{bg * paper[0], bg * paper[1], bg * paper[2]};
      if (in_photo(x, y)) {
        base = spec.photo_patch->intensity;
        rgb = {base, base, base};
      } else if (ink[idx]) {
        base = bg * kTextDarkness;
        for (double& c : rgb) c *= kTextDarkness;
      }
      const double lit = bg + glow[idx];
      if (glow_hue[idx] >= 0 && lit > base) {
        const auto& hue = kFiberHues[static_cast<std::size_t>(glow_hue[idx])];
        for (int c = 0; c < 3; ++c) rgb[c] = bg * paper[c] + glow[idx] * hue[c];
        base = lit;
      }
      page.clean.at(x, y) = base;
      color[idx] = rgb;
    }
  }

  page.image = RasterImage(w, h, 3);
  auto out = page.image.samples();
  for (std::size_t i = 0; i < n; ++i) {
    const double noise = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
    for (int c = 0; c < 3; ++c) out[3 * i + c] = to_byte(color[i][c] + noise);
  }

  page.truth.fibers.reserve(fibers.size());
  for (FiberDraw& f : fibers) page.truth.fibers.push_back(std::move(f.truth));
  return page;
}

// ---------------------------------------------------------------------------
// Corpus

SyntheticSpec corpus_page_spec(const SyntheticSpec& base_spec, bool model_page,
                               std::uint64_t page_seed) {
  // Separate stream from the page renderer, which also starts from page_seed.
  Xoshiro256 rng(page_seed ^ 0x5DEECE66DULL);
  SyntheticSpec spec = base_spec;
  spec.model_page = model_page;
  if (model_page) {
    spec.fiber_count = 0;
    spec.background_base = rng.uniform(0.6, 0.9);
  } else {
    spec.fiber_count = static_cast<int>(rng.uniform_int(8, 25));
    spec.background_base = std::clamp(base_spec.background_base * rng.uniform(0.75, 1.25), 0.0, 1.0);
  }
  for (double& g : spec.background_gradient) {
    if (rng.uniform() < 0.5) g = -g;
  }
  return spec;
}

void generate_corpus(const std::filesystem::path& dir, int n_authentic, int n_model,
                     const SyntheticSpec& base_spec, std::uint64_t seed) {
  if (n_authentic < 0 || n_model < 0) {
    throw Error(ErrorCode::kInvalidSpec, "page counts must be >= 0");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kUnwritable, "cannot create corpus directory: " + dir.string());
  }
  const int total = n_authentic + n_model;
  for (int i = 0; i < total; ++i) {
    const std::uint64_t page_seed = seed + static_cast<std::uint64_t>(i);
    const SyntheticSpec spec = corpus_page_spec(base_spec, i >= n_authentic, page_seed);
    const SyntheticPage page = generate_page(spec, page_seed);
    char stem[32];
    std::snprintf(stem, sizeof stem, "page_%04d", i);
    write_raster(dir / (std::string(stem) + ".ppm"), page.image);
    write_text_file(dir / (std::string(stem) + ".json"), truth_to_json(page.truth));
  }
}

}  // namespace fiberscan
