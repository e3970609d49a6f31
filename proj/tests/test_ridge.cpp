#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fiberscan/error.hpp"
#include "fiberscan/morphology.hpp"
#include "fiberscan/pipeline.hpp"
#include "fiberscan/ridge.hpp"
#include "fiberscan/synthgen.hpp"
#include "oracles.hpp"

namespace fiberscan {
namespace {

GrayImage from_function(int w, int h, auto f) {
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.at(x, y) = f(static_cast<double>(x), static_cast<double>(y));
  }
  return img;
}

GrayImage mask_image(const Mask& m) {
  GrayImage out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) out.at(x, y) = m.at(x, y) ? 1.0 : 0.0;
  }
  return out;
}

bool subset(const Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.bits().size(); ++i) {
    if (a.bits()[i] && !b.bits()[i]) return false;
  }
  return true;
}

// Hand-built maps for NMS and hysteresis: every listed pixel is a candidate.
RidgeMaps manual_maps(const GrayImage& strength, Vec2 dir = {1.0, 0.0}) {
  RidgeMaps maps;
  maps.strength = strength;
  maps.candidates = Mask(strength.width(), strength.height());
  maps.final_mask = Mask(strength.width(), strength.height());
  maps.direction.assign(strength.size(), dir);
  for (int y = 0; y < strength.height(); ++y) {
    for (int x = 0; x < strength.width(); ++x) {
      if (strength.at(x, y) > 0.0) maps.candidates.set(x, y);
    }
  }
  return maps;
}

TEST(GaussianSmooth, ZeroSigmaAndConstant) {
  std::mt19937_64 rng(1);
  const GrayImage img = oracle::random_real(11, 9, rng);
  EXPECT_EQ(gaussian_smooth(img, 0.0), img);
  const GrayImage c(10, 10, 0.42);
  const GrayImage smooth = gaussian_smooth(c, 1.7);
  for (double v : smooth.samples()) EXPECT_NEAR(v, 0.42, 1e-9);
}

TEST(GaussianSmooth, ImpulseGivesTabulatedKernel) {
  const double sigma = 1.0;
  const int r = 3;
  GrayImage img(15, 15);
  img.at(7, 7) = 1.0;
  const GrayImage out = gaussian_smooth(img, sigma);
  std::vector<double> k(2 * r + 1);
  for (int i = -r; i <= r; ++i) k[i + r] = std::exp(-i * i / (2 * sigma * sigma));
  const double sum = std::accumulate(k.begin(), k.end(), 0.0);
  for (double& v : k) v /= sum;
  double total = 0.0;
  for (int y = 0; y < 15; ++y) {
    for (int x = 0; x < 15; ++x) {
      const int dx = x - 7, dy = y - 7;
      const double expect =
          (std::abs(dx) <= r && std::abs(dy) <= r) ? k[dx + r] * k[dy + r] : 0.0;
      EXPECT_NEAR(out.at(x, y), expect, 1e-12);
      total += out.at(x, y);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(Scharr, ConstantAndRamps) {
  const GrayImage c(8, 8, 0.5);
  const GradientField g = scharr_gradient(c);
  for (double v : g.gx.samples()) EXPECT_EQ(v, 0.0);
  for (double v : g.gy.samples()) EXPECT_EQ(v, 0.0);

  for (double a : {1.0, 0.37, -2.5}) {
    const GradientField gx = scharr_gradient(from_function(12, 10, [&](double x, double) { return a * x; }));
    const GradientField gy = scharr_gradient(from_function(12, 10, [&](double, double y) { return a * y; }));
    for (int y = 1; y < 9; ++y) {
      for (int x = 1; x < 11; ++x) {
        EXPECT_LT(std::abs(gx.gx.at(x, y) - a), 1e-9);
        EXPECT_LT(std::abs(gx.gy.at(x, y)), 1e-9);
        EXPECT_LT(std::abs(gy.gy.at(x, y) - a), 1e-9);
        EXPECT_LT(std::abs(gy.gx.at(x, y)), 1e-9);
      }
    }
  }
}

TEST(Scharr, TooSmall) {
  try {
    scharr_gradient(GrayImage(2, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooSmall);
  }
  EXPECT_THROW(hessian_field(GrayImage(4, 4)), Error);
}

TEST(Hessian, Polynomials) {
  const HessianField zero = hessian_field(GrayImage(9, 9, 0.3));
  for (double v : zero.ixx.samples()) EXPECT_EQ(v, 0.0);

  const HessianField sq = hessian_field(from_function(16, 14, [](double x, double) { return x * x; }));
  const HessianField xy = hessian_field(from_function(16, 14, [](double x, double y) { return x * y; }));
  for (int y = 2; y < 12; ++y) {
    for (int x = 2; x < 14; ++x) {
      EXPECT_LT(std::abs(sq.ixx.at(x, y) - 2.0), 1e-6);
      EXPECT_LT(std::abs(sq.ixy.at(x, y)), 1e-6);
      EXPECT_LT(std::abs(sq.iyy.at(x, y)), 1e-6);
      EXPECT_LT(std::abs(xy.ixy.at(x, y) - 1.0), 1e-6);
      EXPECT_LT(std::abs(xy.ixx.at(x, y)), 1e-6);
      EXPECT_LT(std::abs(xy.iyy.at(x, y)), 1e-6);
    }
  }
}

TEST(Hessian, MatchesDifferencesOfGradient) {
  const auto f = [](double x, double y) {
    return 0.6 * std::sin(0.03 * x + 0.02 * y) + 0.4 * std::cos(0.04 * y - 0.01 * x + 1.0);
  };
  const GrayImage img = from_function(40, 40, f);
  const GradientField g = scharr_gradient(img);
  const HessianField h = hessian_field(img);
  for (int y = 4; y < 36; ++y) {
    for (int x = 4; x < 36; ++x) {
      const double ixx = 0.5 * (g.gx.at(x + 1, y) - g.gx.at(x - 1, y));
      const double iyy = 0.5 * (g.gy.at(x, y + 1) - g.gy.at(x, y - 1));
      const double ixy = 0.5 * (g.gx.at(x, y + 1) - g.gx.at(x, y - 1));
      EXPECT_LT(std::abs(h.ixx.at(x, y) - ixx), 1e-6);
      EXPECT_LT(std::abs(h.iyy.at(x, y) - iyy), 1e-6);
      EXPECT_LT(std::abs(h.ixy.at(x, y) - ixy), 1e-6);
    }
  }
}

TEST(Eigen, ReferenceCases) {
  EigenPair e = eig_sym2(-2, 0, -1);
  EXPECT_DOUBLE_EQ(e.lambda_min, -2);
  EXPECT_DOUBLE_EQ(e.lambda_max, -1);
  EXPECT_NEAR(e.v_min.x, 1, 1e-12);
  EXPECT_NEAR(e.v_min.y, 0, 1e-12);

  e = eig_sym2(0, 1, 0);
  EXPECT_NEAR(e.lambda_min, -1, 1e-12);
  EXPECT_NEAR(e.lambda_max, 1, 1e-12);
  EXPECT_NEAR(e.v_min.x, M_SQRT1_2, 1e-12);
  EXPECT_NEAR(e.v_min.y, -M_SQRT1_2, 1e-12);

  e = eig_sym2(3, 0, 3);
  EXPECT_EQ(e.lambda_min, 3);
  EXPECT_EQ(e.lambda_max, 3);
  EXPECT_EQ(e.v_min.x, 1);
  EXPECT_EQ(e.v_min.y, 0);

  e = eig_sym2(5, 0, 1);
  EXPECT_NEAR(e.v_min.x, 0, 1e-12);
  EXPECT_NEAR(e.v_min.y, 1, 1e-12);
}

TEST(Eigen, RandomMatrixIdentities) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const EigenPair e = eig_sym2(a, b, c);
    const Vec2 v = e.v_min;
    ASSERT_LE(e.lambda_min, e.lambda_max);
    ASSERT_NEAR(std::hypot(v.x, v.y), 1.0, 1e-9);
    ASSERT_TRUE(v.x > 0 || (v.x == 0 && v.y >= 0));
    ASSERT_NEAR(a * v.x + b * v.y, e.lambda_min * v.x, 1e-9);
    ASSERT_NEAR(b * v.x + c * v.y, e.lambda_min * v.y, 1e-9);
    ASSERT_NEAR(e.lambda_min + e.lambda_max, a + c, 1e-9);
    ASSERT_NEAR(e.lambda_min * e.lambda_max, a * c - b * b, 1e-9);
  }
}

TEST(Direction, RoundsToNearestNeighbour) {
  const auto r = [](double deg) {
    const double a = deg * M_PI / 180.0;
    return round_direction({std::cos(a), std::sin(a)});
  };
  EXPECT_EQ(r(0).dx, 1);
  EXPECT_EQ(r(0).dy, 0);
  EXPECT_EQ(r(-45).dx, 1);
  EXPECT_EQ(r(-45).dy, -1);
  EXPECT_EQ(r(-80).dx, 0);
  EXPECT_EQ(r(-80).dy, -1);
  EXPECT_EQ(r(80).dx, 0);
  EXPECT_EQ(r(80).dy, 1);
  EXPECT_EQ(r(40).dx, 1);
  EXPECT_EQ(r(40).dy, 1);
  // All scores tie for the zero vector: the first offset (E) wins.
  const Offset t = round_direction({0.0, 0.0});
  EXPECT_EQ(t.dx, 1);
  EXPECT_EQ(t.dy, 0);
}

TEST(Candidates, ConstantImageHasNone) {
  const RidgeMaps m = ridge_candidates(GrayImage(20, 20, 1.0), RidgeParams{});
  EXPECT_EQ(m.candidates.count(), 0u);
  EXPECT_EQ(detect_ridges(GrayImage(20, 20, 1.0), RidgeParams{}).final_mask.count(), 0u);
}

TEST(Candidates, VerticalGaussianRidge) {
  const GrayImage img = oracle::gaussian_ridge(48, 48, 90.0, 24.0, 24.0, 1.0, 1.5);
  const RidgeMaps m = ridge_candidates(img, RidgeParams{});
  for (int y = 3; y < 45; ++y) {
    ASSERT_TRUE(m.candidates.at(24, y)) << y;
    const Vec2 v = m.direction[static_cast<std::size_t>(y) * 48 + 24];
    EXPECT_LE(std::atan2(std::abs(v.y), std::abs(v.x)), 5.0 * M_PI / 180.0);
  }
}

TEST(Candidates, StepEdgeBrightSideRejected) {
  const GrayImage img = from_function(30, 20, [](double x, double) { return x >= 15 ? 1.0 : 0.0; });
  const RidgeMaps m = ridge_candidates(img, RidgeParams{});
  for (int y = 0; y < 20; ++y) {
    for (int x = 15; x < 30; ++x) EXPECT_FALSE(m.candidates.at(x, y)) << x << "," << y;
  }
}

TEST(Candidates, BorderExcludedAndStrengthConsistent) {
  std::mt19937_64 rng(8);
  const GrayImage img = gaussian_smooth(oracle::random_real(30, 30, rng), 1.0);
  const RidgeMaps m = ridge_candidates(img, RidgeParams{});
  EXPECT_GT(m.candidates.count(), 0u);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 30; ++x) {
      if (x < 2 || y < 2 || x >= 28 || y >= 28) EXPECT_FALSE(m.candidates.at(x, y));
      EXPECT_GE(m.strength.at(x, y), 0.0);
      if (!m.candidates.at(x, y)) EXPECT_EQ(m.strength.at(x, y), 0.0);
    }
  }
}

TEST(Nms, StrictInteriorMaximum) {
  GrayImage s(5, 3);
  s.at(1, 1) = 1;
  s.at(2, 1) = 3;
  s.at(3, 1) = 2;
  const RidgeMaps out = nms(manual_maps(s));
  EXPECT_EQ(out.candidates.count(), 1u);
  EXPECT_TRUE(out.candidates.at(2, 1));
  EXPECT_EQ(out.strength.at(2, 1), 3);
  EXPECT_EQ(out.strength.at(3, 1), 0);
}

TEST(Nms, PlateauKeepsExactlyOne) {
  GrayImage s(4, 1, {0, 3, 3, 0});
  const RidgeMaps out = nms(manual_maps(s));
  EXPECT_EQ(out.candidates.count(), 1u);
  EXPECT_TRUE(out.candidates.at(1, 0));
}

TEST(Nms, VerticalRidgeOnePixelPerRow) {
  const GrayImage img = oracle::gaussian_ridge(48, 48, 90.0, 23.6, 24.0, 1.0, 1.5);
  const RidgeMaps m = nms(ridge_candidates(img, RidgeParams{}));
  for (int y = 3; y < 45; ++y) {
    int row = 0;
    for (int x = 0; x < 48; ++x) row += m.candidates.at(x, y);
    EXPECT_EQ(row, 1) << "row " << y;
    EXPECT_TRUE(m.candidates.at(24, y));
  }
}

// Two survivors one step apart along a direction they both round to would
// each have to be strictly larger than the other.
TEST(Nms, NoAdjacentSurvivorsAlongSharedDirection) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    const GrayImage img = gaussian_smooth(oracle::random_real(32, 32, rng), 1.5);
    const RidgeMaps m = nms(ridge_candidates(img, RidgeParams{}));
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        if (!m.candidates.at(x, y)) continue;
        const Offset r = round_direction(m.direction[static_cast<std::size_t>(y) * 32 + x]);
        for (int sign : {-1, 1}) {
          const int qx = x + sign * r.dx, qy = y + sign * r.dy;
          if (!m.candidates.in_bounds(qx, qy) || !m.candidates.at(qx, qy)) continue;
          const Offset rq = round_direction(m.direction[static_cast<std::size_t>(qy) * 32 + qx]);
          const bool same_line = (rq.dx == r.dx && rq.dy == r.dy) || (rq.dx == -r.dx && rq.dy == -r.dy);
          EXPECT_FALSE(same_line) << x << "," << y;
        }
      }
    }
  }
}

TEST(Hysteresis, TrivialThresholds) {
  std::mt19937_64 rng(2);
  GrayImage s(10, 10);
  std::uniform_real_distribution<double> u(0.1, 0.5);
  for (double& v : s.samples()) v = u(rng);
  const RidgeMaps maps = manual_maps(s);
  EXPECT_EQ(hysteresis(maps, 0.05, 0.1), maps.candidates);
  EXPECT_EQ(hysteresis(maps, 0.6, 0.7).count(), 0u);
  EXPECT_THROW(hysteresis(maps, 0.7, 0.6), Error);
}

TEST(Hysteresis, ChainNeedsStrongSeed) {
  const double t_low = 0.02, t_high = 0.06;
  GrayImage s(12, 12);
  for (int k = 0; k < 10; ++k) s.at(1 + k, 1 + (k % 3 == 2 ? 1 : 0) + k / 3) = 0.9 * t_high;
  s.at(10, 4) = 1.1 * t_high;
  const RidgeMaps with_seed = manual_maps(s);
  const Mask kept = hysteresis(with_seed, t_low, t_high);
  EXPECT_EQ(kept, oracle::fixed_point_hysteresis(s, with_seed.candidates, t_low, t_high));
  EXPECT_EQ(kept, with_seed.candidates);

  s.at(10, 4) = 0.0;
  EXPECT_EQ(hysteresis(manual_maps(s), t_low, t_high).count(), 0u);
}

TEST(Hysteresis, MatchesFixedPointOracleAndIsMonotone) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  std::bernoulli_distribution on(0.45);
  for (int i = 0; i < 100; ++i) {
    GrayImage s(24, 24);
    for (double& v : s.samples()) v = on(rng) ? u(rng) : 0.0;
    const RidgeMaps maps = manual_maps(s);
    const Mask base = hysteresis(maps, 0.02, 0.06);
    ASSERT_EQ(base, oracle::fixed_point_hysteresis(s, maps.candidates, 0.02, 0.06));
    ASSERT_TRUE(subset(base, maps.candidates));
    ASSERT_TRUE(subset(base, hysteresis(maps, 0.01, 0.06)));
    ASSERT_TRUE(subset(base, hysteresis(maps, 0.02, 0.04)));
    ASSERT_TRUE(subset(hysteresis(maps, 0.03, 0.08), base));
  }
}

TEST(DetectRidges, RotationEquivariant) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 5; ++i) {
    const GrayImage img = gaussian_smooth(oracle::random_real(37, 29, rng), 1.2);
    const RidgeMaps a = detect_ridges(img, RidgeParams{});
    const RidgeMaps b = detect_ridges(rotate90(img), RidgeParams{});
    EXPECT_EQ(mask_image(b.final_mask), rotate90(mask_image(a.final_mask)));
    EXPECT_EQ(b.strength, rotate90(a.strength));
  }
  for (double deg : {0.0, 30.0, 45.0, 60.0, 120.0}) {
    const GrayImage img = oracle::gaussian_ridge(50, 50, deg, 24.3, 25.6, 1.0, 1.5);
    const RidgeMaps a = detect_ridges(img, RidgeParams{});
    const RidgeMaps b = detect_ridges(rotate90(img), RidgeParams{});
    EXPECT_EQ(mask_image(b.final_mask), rotate90(mask_image(a.final_mask))) << deg;
  }
}

TEST(DetectRidges, FinalPixelsPassTheGate) {
  std::mt19937_64 rng(41);
  const RidgeParams params;
  const GrayImage img = gaussian_smooth(oracle::random_real(40, 40, rng), 1.0);
  const RidgeMaps m = detect_ridges(img, params);
  const GrayImage smooth = gaussian_smooth(img, params.smooth_sigma);
  const HessianField h = hessian_field(smooth);
  ASSERT_GT(m.final_mask.count(), 0u);
  ASSERT_TRUE(subset(m.final_mask, m.candidates));
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 40; ++x) {
      if (!m.final_mask.at(x, y)) continue;
      const EigenPair e = eig_sym2(h.ixx.at(x, y), h.ixy.at(x, y), h.iyy.at(x, y));
      EXPECT_LT(e.lambda_min, 0.0);
      const double c = smooth.at(x, y);
      EXPECT_GT(c, sample_bilinear(smooth, x + e.v_min.x, y + e.v_min.y));
      EXPECT_GT(c, sample_bilinear(smooth, x - e.v_min.x, y - e.v_min.y));
    }
  }
}

TEST(DetectRidges, SyntheticFiberLocalized) {
  SyntheticSpec spec;
  spec.width = 160;
  spec.height = 160;
  spec.fiber_count = 1;
  spec.text_blocks = 0;
  spec.fiber_length_range = {60.0, 80.0};
  const std::uint64_t seed = 5;
  const SyntheticPage page = generate_page(spec, seed);
  PipelineTrace trace;
  run_pipeline(page.image, DetectorConfig{}, &trace);
  const Mask& m = trace.ridges.final_mask;
  const auto centerline = rasterize_polyline(page.truth.fibers.at(0).points);
  std::size_t near = 0;
  for (const Pixel& p : centerline) {
    bool hit = false;
    for (int dy = -1; dy <= 1 && !hit; ++dy) {
      for (int dx = -1; dx <= 1 && !hit; ++dx) {
        hit = m.in_bounds(p.x + dx, p.y + dy) && m.at(p.x + dx, p.y + dy);
      }
    }
    near += hit;
  }
  EXPECT_GE(static_cast<double>(near), 0.9 * static_cast<double>(centerline.size()));
}

TEST(RidgeParamsTest, Validation) {
  EXPECT_NO_THROW(RidgeParams{}.validate());
  EXPECT_THROW((RidgeParams{1.0, 1.0, 0.1, 0.05}.validate()), Error);
  EXPECT_THROW((RidgeParams{-1.0, 1.0, 0.02, 0.06}.validate()), Error);
  EXPECT_THROW((RidgeParams{1.0, 0.0, 0.02, 0.06}.validate()), Error);
}

}  // namespace
}  // namespace fiberscan
