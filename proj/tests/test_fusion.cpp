#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "fusion_oracle.hpp"
#include "panofuse/denoiser.hpp"
#include "panofuse/errors.hpp"
#include "panofuse/fusion.hpp"
#include "panofuse/metrics.hpp"
#include "panofuse/schedule.hpp"

using namespace panofuse;

namespace {

TilePlan pair_plan(int crop_h, int crop_w, int s_v) {
  return build_tile_plan(TileGeometry{crop_h, crop_w + s_v, crop_h, crop_w, s_v, 1, 1,
                                      Weighting::uniform},
                         0);
}

LatentGrid random_grid(GridShape shape, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 2.0);
  LatentGrid g(shape);
  for (double& v : g.values()) v = n(rng);
  return g;
}

}  // namespace

TEST_SUITE("fusion") {
  TEST_CASE("scalar overlap arithmetic") {
    const auto plan = pair_plan(1, 4, 2);
    const LatentGrid neighbor({1, 4, 1}, 2.0);
    const LatentGrid self({1, 4, 1}, 4.0);
    const auto out = fuse_crop_pair(neighbor, plan.windows[0], self, plan.windows[1], 1.0);
    CHECK(out.at(0, 0, 0) == 3.0);
    CHECK(out.at(0, 1, 0) == 3.0);
    CHECK(out.at(0, 2, 0) == 4.0);
    CHECK(out.at(0, 3, 0) == 4.0);
  }

  TEST_CASE("lambda limits") {
    std::mt19937_64 rng(3);
    const auto plan = pair_plan(8, 8, 3);
    const auto n = random_grid({8, 8, 2}, rng);
    const auto f = random_grid({8, 8, 2}, rng);
    const auto& w1 = plan.windows[0];
    const auto& w2 = plan.windows[1];
    const auto copy = fuse_crop_pair(n, w1, f, w2, 0.0);
    const auto stiff = fuse_crop_pair(n, w1, f, w2, 1e6);
    for (std::size_t y = 0; y < 8; ++y) {
      for (std::size_t x = 0; x < 8; ++x) {
        for (std::size_t c = 0; c < 2; ++c) {
          if (x < 5) {
            CHECK(copy.at(y, x, c) == n.at(y, x + 3, c));
          } else {
            CHECK(copy.at(y, x, c) == f.at(y, x, c));
          }
          CHECK(std::abs(stiff.at(y, x, c) - f.at(y, x, c)) <= 1e-5);
        }
      }
    }
  }

  TEST_CASE("closed form matches the normal-equation solve of the full quadratic") {
    std::mt19937_64 rng(17);
    for (double lambda : {0.1, 1.0, 80.0}) {
      for (int s_v : {1, 3, 6}) {
        const auto plan = pair_plan(8, 8, s_v);
        const auto n = random_grid({8, 8, 1}, rng);
        const auto f = random_grid({8, 8, 1}, rng);
        const auto got = fuse_crop_pair(n, plan.windows[0], f, plan.windows[1], lambda);
        const auto expected = oracle::solve_pair_quadratic(n, plan.windows[0], f, plan.windows[1], lambda);
        CHECK(max_abs_diff(got, expected) <= 1e-8);
      }
    }
  }

  TEST_CASE("matching term contracts by (lambda / (1 + lambda))^2") {
    std::mt19937_64 rng(23);
    const auto plan = pair_plan(6, 10, 4);
    for (double lambda : {0.0, 0.5, 1.0, 10.0}) {
      const auto n = random_grid({6, 10, 3}, rng);
      const auto f = random_grid({6, 10, 3}, rng);
      const double before = pair_overlap_residual(n, plan.windows[0], f, plan.windows[1]);
      const auto fused = fuse_crop_pair(n, plan.windows[0], f, plan.windows[1], lambda);
      const double after = pair_overlap_residual(n, plan.windows[0], fused, plan.windows[1]);
      const double factor = (lambda / (1 + lambda)) * (lambda / (1 + lambda));
      CHECK(std::abs(after - factor * before) <= 1e-8 * std::max(1.0, before));
    }
  }

  TEST_CASE("fusion only touches the left overlap band") {
    std::mt19937_64 rng(29);
    const auto plan = pair_plan(5, 12, 5);
    const auto n = random_grid({5, 12, 2}, rng);
    const auto f = random_grid({5, 12, 2}, rng);
    const auto out = fuse_crop_pair(n, plan.windows[0], f, plan.windows[1], 0.7);
    for (std::size_t y = 0; y < 5; ++y)
      for (std::size_t x = 7; x < 12; ++x)
        for (std::size_t c = 0; c < 2; ++c) CHECK(out.at(y, x, c) == f.at(y, x, c));
  }

  TEST_CASE("fuse_crop_pair errors") {
    const auto plan = pair_plan(2, 4, 2);
    const LatentGrid g({2, 4, 1});
    CHECK_THROWS_AS(fuse_crop_pair(g, plan.windows[0], g, plan.windows[1], -1.0), ConfigError);
    CHECK_THROWS_AS(fuse_crop_pair(g, plan.windows[0], g, plan.windows[0], 1.0), ConfigError);
    CHECK_THROWS_AS(fuse_crop_pair(g, plan.windows[0], LatentGrid({2, 5, 1}), plan.windows[1], 1.0),
                    ConfigError);
  }

  TEST_CASE("weighted average: identity, mean and naive accumulation") {
    const auto single = build_tile_plan(TileGeometry{2, 4, 2, 4, 1, 1, 1, Weighting::uniform}, 0);
    const LatentGrid tile({2, 4, 1}, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(fuse_weighted_average(single.windows, std::vector{tile}, {2, 4, 1}) == tile);

    const auto two = build_tile_plan(TileGeometry{1, 3, 1, 2, 1, 1, 1, Weighting::uniform}, 0);
    const std::vector<LatentGrid> crops{LatentGrid({1, 2, 1}, 1.0), LatentGrid({1, 2, 1}, 3.0)};
    const auto avg = fuse_weighted_average(two.windows, crops, {1, 3, 1});
    CHECK(avg.values()[0] == 1.0);
    CHECK(avg.values()[1] == 2.0);
    CHECK(avg.values()[2] == 3.0);

    const auto gauss = build_tile_plan(TileGeometry{1, 8, 1, 4, 2, 1, 1, Weighting::gaussian}, 0);
    REQUIRE(gauss.size() == 3);
    std::mt19937_64 rng(31);
    std::vector<LatentGrid> g_crops;
    for (int i = 0; i < 3; ++i) g_crops.push_back(random_grid({1, 4, 2}, rng));
    const auto got = fuse_weighted_average(gauss.windows, g_crops, {1, 8, 2});
    // Naive per-cell accumulation: visit every crop that contains the cell.
    for (int x = 0; x < 8; ++x) {
      for (std::size_t c = 0; c < 2; ++c) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
          const auto& w = gauss.windows[i];
          const int local = x - w.x_offset;
          if (local < 0 || local >= w.crop_w) continue;
          num += w.weight_at(0, local) * g_crops[i].at(0, static_cast<std::size_t>(local), c);
          den += w.weight_at(0, local);
        }
        CHECK(std::abs(got.at(0, static_cast<std::size_t>(x), c) - num / den) <= 1e-12);
      }
    }
  }

  TEST_CASE("weighted average stays within the covering values") {
    std::mt19937_64 rng(37);
    for (auto mode : {Weighting::uniform, Weighting::gaussian}) {
      const auto plan = build_tile_plan(TileGeometry{3, 30, 3, 10, 3, 1, 1, mode}, 0);
      std::vector<LatentGrid> crops;
      for (std::size_t i = 0; i < plan.size(); ++i) crops.push_back(random_grid({3, 10, 1}, rng));
      const auto out = fuse_weighted_average(plan.windows, crops, {3, 30, 1});
      for (std::size_t y = 0; y < 3; ++y) {
        for (int x = 0; x < 30; ++x) {
          double lo = 1e300, hi = -1e300;
          for (std::size_t i = 0; i < plan.size(); ++i) {
            const int local = x - plan.windows[i].x_offset;
            if (local < 0 || local >= 10) continue;
            lo = std::min(lo, crops[i].at(y, static_cast<std::size_t>(local), 0));
            hi = std::max(hi, crops[i].at(y, static_cast<std::size_t>(local), 0));
          }
          const double v = out.at(y, static_cast<std::size_t>(x), 0);
          CHECK(v >= lo - 1e-12);
          CHECK(v <= hi + 1e-12);
        }
      }
      // Identical content on every overlap comes back unchanged.
      LatentGrid pano({3, 30, 1});
      for (std::size_t i = 0; i < pano.size(); ++i) pano.values()[i] = std::cos(0.1 * static_cast<double>(i));
      std::vector<LatentGrid> same;
      for (const auto& w : plan.windows) same.push_back(crop(pano, w));
      CHECK(max_abs_diff(fuse_weighted_average(plan.windows, same, {3, 30, 1}), pano) <= 1e-14);
    }
  }

  TEST_CASE("weighted average rejects uncovered cells") {
    CropWindow w;
    w.crop_h = 1;
    w.crop_w = 2;
    w.weight.assign(2, 1.0);
    CHECK_THROWS_AS(fuse_weighted_average(std::vector{w}, std::vector{LatentGrid({1, 2, 1})}, {1, 3, 1}),
                    ConfigError);
  }

  TEST_CASE("sweep is the identity for baseline and after tau") {
    std::mt19937_64 rng(41);
    const auto plan = build_tile_plan(TileGeometry{4, 40, 4, 16, 6, 1, 1, Weighting::uniform}, 0);
    std::vector<LatentGrid> crops;
    for (std::size_t i = 0; i < plan.size(); ++i) crops.push_back(random_grid({4, 16, 2}, rng));
    FusionConfig cfg;
    cfg.variant = FusionVariant::baseline;
    cfg.tau = 0;
    CHECK(twin_fusion_sweep(crops, plan, cfg, 10) == crops);
    cfg.variant = FusionVariant::twin;
    cfg.tau = 25;
    CHECK(twin_fusion_sweep(crops, plan, cfg, 25) == crops);
    CHECK(twin_fusion_sweep(crops, plan, cfg, 3) == crops);
    CHECK_FALSE(twin_fusion_sweep(crops, plan, cfg, 26) == crops);
  }

  TEST_CASE("sweep on a crop-anchored ramp contracts the first pair by 1/4") {
    const auto schedule = build_linear_schedule(50, 0.00085, 0.012);
    const auto plan = build_tile_plan(TileGeometry{2, 32, 2, 16, 8, 1, 1, Weighting::uniform}, 0);
    REQUIRE(plan.size() == 3);
    DenoiserSpec spec;
    spec.kind = DenoiserKind::crop_anchored;
    spec.target.slope = 1.0 / 16.0;
    std::mt19937_64 rng(43);
    const auto pano = random_grid({2, 32, 1}, rng);
    std::vector<LatentGrid> denoised;
    for (const auto& w : plan.windows) {
      const auto z = crop(pano, w);
      denoised.push_back(ddim_step(z, predict_noise(spec, z, 40, w.x_offset, schedule), 40, schedule));
    }
    FusionConfig cfg;
    cfg.lambda = 1.0;
    cfg.tau = 25;
    const auto fused = twin_fusion_sweep(denoised, plan, cfg, 40);
    const double before = pair_overlap_residual(denoised[0], plan.windows[0], denoised[1], plan.windows[1]);
    const double after = pair_overlap_residual(fused[0], plan.windows[0], fused[1], plan.windows[1]);
    CHECK(before > 0.0);
    CHECK(after == doctest::Approx(0.25 * before).epsilon(1e-10));
    CHECK(fused[0] == denoised[0]);
  }

  TEST_CASE("neighbor source and fixed references") {
    std::mt19937_64 rng(47);
    const auto plan = build_tile_plan(TileGeometry{2, 24, 2, 12, 4, 1, 1, Weighting::uniform}, 0);
    std::vector<LatentGrid> crops, refs;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      crops.push_back(random_grid({2, 12, 1}, rng));
      refs.push_back(random_grid({2, 12, 1}, rng));
    }
    FusionConfig cfg;
    cfg.tau = 0;
    cfg.lambda = 2.0;
    cfg.neighbor = NeighborSource::raw;
    const auto raw = twin_fusion_sweep(crops, plan, cfg, 1);
    for (std::size_t i = 1; i < plan.size(); ++i) {
      CHECK(raw[i] == fuse_crop_pair(crops[i - 1], plan.windows[i - 1], crops[i], plan.windows[i], 2.0));
    }
    cfg.neighbor = NeighborSource::optimized;
    cfg.variant = FusionVariant::twin_fixed_reference;
    CHECK_THROWS_AS(twin_fusion_sweep(crops, plan, cfg, 1), ConfigError);
    const auto fixed = twin_fusion_sweep(crops, plan, cfg, 1, refs);
    CHECK(fixed[0] == crops[0]);
    for (std::size_t i = 1; i < plan.size(); ++i) {
      CHECK(fixed[i] == fuse_crop_pair(fixed[i - 1], plan.windows[i - 1], refs[i], plan.windows[i], 2.0));
    }
    CHECK_THROWS_AS(twin_fusion_sweep({crops[0]}, plan, cfg, 1, refs), ConfigError);
  }
}
