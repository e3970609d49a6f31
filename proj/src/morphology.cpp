#include "fiberscan/morphology.hpp"

#include <algorithm>
#include <vector>

#include "fiberscan/error.hpp"

namespace fiberscan {

StructuringElement::StructuringElement(int side) : side_(side) {
  if (side < 1 || side % 2 == 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "structuring element side must be odd and >= 1, got " + std::to_string(side));
  }
}

namespace {

struct MaxOp {
  double operator()(double a, double b) const { return a < b ? b : a; }
};
struct MinOp {
  double operator()(double a, double b) const { return b < a ? b : a; }
};

// Running window op along rows. Within each block of k padded samples `fwd`
// holds the prefix reduction and `bwd` the suffix reduction; any window of k
// samples is the op of one suffix and one prefix.
template <typename Op>
void filter_rows(const GrayImage& src, GrayImage& dst, int k, Op op) {
  const int w = src.width();
  const int r = k / 2;
  const int n = w + 2 * r;
  std::vector<double> padded(n), fwd(n), bwd(n);
  for (int y = 0; y < src.height(); ++y) {
    const double* in = src.row(y);
    for (int i = 0; i < r; ++i) {
      padded[i] = in[0];
      padded[n - 1 - i] = in[w - 1];
    }
    std::copy(in, in + w, padded.begin() + r);
    for (int b = 0; b < n; b += k) {
      const int e = std::min(b + k, n);
      fwd[b] = padded[b];
      for (int i = b + 1; i < e; ++i) fwd[i] = op(fwd[i - 1], padded[i]);
      bwd[e - 1] = padded[e - 1];
      for (int i = e - 2; i >= b; --i) bwd[i] = op(bwd[i + 1], padded[i]);
    }
    double* out = dst.row(y);
    for (int x = 0; x < w; ++x) out[x] = op(bwd[x], fwd[x + k - 1]);
  }
}

// Same scheme along columns, one block of k rows at a time: output row y
// needs the suffix from its own block and the prefix from the next one.
template <typename Op>
void filter_cols(const GrayImage& src, GrayImage& dst, int k, Op op) {
  const int w = src.width();
  const int h = src.height();
  const int r = k / 2;
  const int n = h + 2 * r;
  const auto src_row = [&](int i) { return src.row(std::clamp(i - r, 0, h - 1)); };
  const auto ku = static_cast<std::size_t>(k);
  std::vector<double> bwd(ku * w), fwd(ku * w);
  const auto fwd_row = [&](int j) { return fwd.data() + static_cast<std::size_t>(j) * w; };
  const auto bwd_row = [&](int j) { return bwd.data() + static_cast<std::size_t>(j) * w; };

  for (int b = 0; b < h; b += k) {
    // Suffix reductions over padded rows [b, min(b+k, n)).
    const int e = std::min(b + k, n);
    std::copy(src_row(e - 1), src_row(e - 1) + w, bwd_row(e - 1 - b));
    for (int i = e - 2; i >= b; --i) {
      const double* in = src_row(i);
      const double* next = bwd_row(i + 1 - b);
      double* cur = bwd_row(i - b);
      for (int x = 0; x < w; ++x) cur[x] = op(next[x], in[x]);
    }
    // Prefix reductions over the following block.
    const int nb = b + k;
    const int ne = std::min(nb + k, n);
    for (int i = nb; i < ne; ++i) {
      const double* in = src_row(i);
      double* cur = fwd_row(i - nb);
      if (i == nb) {
        std::copy(in, in + w, cur);
      } else {
        const double* prev = fwd_row(i - 1 - nb);
        for (int x = 0; x < w; ++x) cur[x] = op(prev[x], in[x]);
      }
    }
    for (int y = b; y < std::min(b + k, h); ++y) {
      const double* suffix = bwd_row(y - b);
      double* out = dst.row(y);
      if (y == b) {
        std::copy(suffix, suffix + w, out);
      } else {
        const double* prefix = fwd_row(y + k - 1 - nb);
        for (int x = 0; x < w; ++x) out[x] = op(suffix[x], prefix[x]);
      }
    }
  }
}

template <typename Op>
GrayImage square_filter(const GrayImage& img, StructuringElement se, Op op) {
  if (se.side() == 1) return img;
  GrayImage tmp(img.width(), img.height());
  GrayImage out(img.width(), img.height());
  filter_rows(img, tmp, se.side(), op);
  filter_cols(tmp, out, se.side(), op);
  return out;
}

}  // namespace

GrayImage dilate(const GrayImage& img, StructuringElement se) {
  return square_filter(img, se, MaxOp{});
}

GrayImage erode(const GrayImage& img, StructuringElement se) {
  return square_filter(img, se, MinOp{});
}

GrayImage opening(const GrayImage& img, StructuringElement se) {
  return dilate(erode(img, se), se);
}

GrayImage closing(const GrayImage& img, StructuringElement se) {
  return erode(dilate(img, se), se);
}

GrayImage suppress_text(const GrayImage& input, StructuringElement se_close) {
  return closing(input, se_close);
}

NormalizationTrace normalize_background(const GrayImage& i0, StructuringElement se_open,
                                        StructuringElement se_dil, double eps) {
  if (!(eps > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "normalization eps must be positive");
  }
  NormalizationTrace trace;
  trace.i0 = i0;
  trace.ibg = opening(i0, se_open);
  trace.idil = dilate(trace.ibg, se_dil);
  trace.ratio = GrayImage(i0.width(), i0.height());
  auto num = i0.samples();
  auto den = trace.idil.samples();
  auto out = trace.ratio.samples();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = num[i] / (den[i] + eps);
  return trace;
}

GrayImage mask_photo_region(const GrayImage& img, const Rect& region) {
  GrayImage out = img;
  const Rect r = clip(region, img.width(), img.height());
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) out.at(x, y) = 1.0;
  }
  return out;
}

}  // namespace fiberscan
