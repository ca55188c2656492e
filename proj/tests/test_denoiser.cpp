#include <cmath>

#include "doctest.h"
#include "panofuse/denoiser.hpp"
#include "panofuse/errors.hpp"
#include "panofuse/external.hpp"
#include "panofuse/schedule.hpp"

using namespace panofuse;

namespace {

PatternSpec ramp(double slope) {
  PatternSpec p;
  p.kind = PatternKind::horizontal_ramp;
  p.slope = slope;
  return p;
}

LatentGrid run_ddim(const DenoiserSpec& spec, LatentGrid z, int x_offset, const NoiseSchedule& s) {
  for (int t = s.steps(); t >= 1; --t) {
    z = ddim_step(z, predict_noise(spec, z, t, x_offset, s), t, s);
  }
  return z;
}

}  // namespace

TEST_SUITE("denoiser") {
  TEST_CASE("ramp pattern") {
    const auto g0 = sample_pattern(ramp(0.25), 0, {1, 4, 1});
    const auto g2 = sample_pattern(ramp(0.25), 2, {1, 4, 1});
    const std::vector<double> e0{0, 0.25, 0.5, 0.75};
    const std::vector<double> e2{0.5, 0.75, 1.0, 1.25};
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(g0.values()[i] == e0[i]);
      CHECK(g2.values()[i] == e2[i]);
    }
  }

  TEST_CASE("checkerboard pattern alternates by cell") {
    PatternSpec p;
    p.kind = PatternKind::checkerboard;
    p.cell = 2;
    const auto g = sample_pattern(p, 0, {2, 4, 1});
    CHECK(g.at(0, 0, 0) == 1.0);
    CHECK(g.at(0, 1, 0) == 1.0);
    CHECK(g.at(0, 2, 0) == -1.0);
  }

  TEST_CASE("smooth noise is deterministic and translation consistent") {
    PatternSpec p;
    p.kind = PatternKind::smooth_noise;
    p.seed = 99;
    p.cell = 5;
    const GridShape shape{6, 20, 3};
    const auto a = sample_pattern(p, 7, shape);
    CHECK(a == sample_pattern(p, 7, shape));
    // Direct recomputation oracle: a wider sample at offset 0 contains both windows.
    const auto wide = sample_pattern(p, 0, {6, 40, 3});
    const auto b = sample_pattern(p, 13, shape);
    for (std::size_t y = 0; y < 6; ++y) {
      for (std::size_t x = 0; x < 20; ++x) {
        for (std::size_t c = 0; c < 3; ++c) {
          CHECK(a.at(y, x, c) == wide.at(y, x + 7, c));
          CHECK(b.at(y, x, c) == wide.at(y, x + 13, c));
        }
      }
    }
    p.seed = 100;
    CHECK_FALSE(sample_pattern(p, 7, shape) == a);
    for (double v : a.values()) CHECK(std::abs(v) <= 1.0);
  }

  TEST_CASE("exact noise vanishes on a clean scaled target") {
    const auto s = build_linear_schedule(20, 0.01, 0.05);
    DenoiserSpec spec;
    spec.target = ramp(0.1);
    const int t = 7;
    auto z = sample_pattern(spec.target, 3, {2, 5, 2});
    for (double& v : z.values()) v *= std::sqrt(s.alpha_bar(t));
    const auto eps = predict_noise(spec, z, t, 3, s);
    for (double v : eps.values()) CHECK(std::abs(v) <= 1e-15);
  }

  TEST_CASE("zero constant denoiser reduces the step to a rescaling") {
    const auto s = build_linear_schedule(20, 0.01, 0.05);
    DenoiserSpec spec;
    spec.kind = DenoiserKind::constant;
    LatentGrid z({2, 3, 1}, std::vector<double>{1, -2, 3, 0.5, 4, -1});
    const auto out = ddim_step(z, predict_noise(spec, z, 5, 0, s), 5, s);
    const double scale = std::sqrt(s.alpha_bar(4) / s.alpha_bar(5));
    for (std::size_t i = 0; i < z.size(); ++i) {
      CHECK(out.values()[i] == doctest::Approx(scale * z.values()[i]).epsilon(1e-15));
    }
  }

  TEST_CASE("crop-anchored prediction differs from exact by the pattern shift") {
    const auto s = build_linear_schedule(20, 0.01, 0.05);
    DenoiserSpec exact;
    exact.target = ramp(0.125);
    DenoiserSpec anchored = exact;
    anchored.kind = DenoiserKind::crop_anchored;
    const int t = 9;
    const int offset = 6;
    const GridShape shape{2, 8, 1};
    LatentGrid z(shape, 0.3);
    const auto e_exact = predict_noise(exact, z, t, offset, s);
    const auto e_anch = predict_noise(anchored, z, t, offset, s);
    const double k = std::sqrt(s.alpha_bar(t)) / std::sqrt(1.0 - s.alpha_bar(t));
    for (std::size_t y = 0; y < 2; ++y) {
      for (std::size_t x = 0; x < 8; ++x) {
        // Pattern evaluation oracle: G(x_local) - G(offset + x_local) = -slope * offset.
        const double g_local = 0.125 * static_cast<double>(x);
        const double g_global = 0.125 * static_cast<double>(x + offset);
        const double expected = k * (g_global - g_local);
        CHECK(e_anch.at(y, x, 0) - e_exact.at(y, x, 0) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("full DDIM trajectory with the exact-noise denoiser recovers the target") {
    DenoiserSpec spec;
    spec.target = ramp(0.25);
    const LatentGrid z_T({4, 4, 1}, std::vector<double>{0.3, -1.2, 0.8, 1.5, -0.4, 0.9, 2.1, -0.7,
                                                        0.05, -0.3, 1.1, -2.0, 0.6, 0.2, -0.9, 1.3});
    for (const auto& s : {build_linear_schedule(50, 0.00085, 0.012),
                          build_linear_schedule(50, 0.0001, 0.2)}) {
      const auto out = run_ddim(spec, z_T, 5, s);
      CHECK(max_abs_diff(out, sample_pattern(spec.target, 5, z_T.shape())) <= 1e-4);
    }
    CHECK(build_linear_schedule(50, 0.0001, 0.2).alpha_bar(50) <= 0.01);
  }

  TEST_CASE("exact predictions agree on shared panorama columns") {
    const auto s = build_linear_schedule(10, 0.01, 0.05);
    DenoiserSpec spec;
    spec.target.kind = PatternKind::smooth_noise;
    spec.target.seed = 5;
    // A panorama-wide latent cropped at two overlapping offsets.
    LatentGrid pano({3, 24, 2});
    for (std::size_t i = 0; i < pano.size(); ++i) pano.values()[i] = std::sin(0.37 * static_cast<double>(i));
    auto window = [&](int off) {
      LatentGrid c({3, 16, 2});
      for (std::size_t y = 0; y < 3; ++y)
        for (std::size_t x = 0; x < 16; ++x)
          for (std::size_t ch = 0; ch < 2; ++ch)
            c.at(y, x, ch) = pano.at(y, x + static_cast<std::size_t>(off), ch);
      return c;
    };
    const auto a = predict_noise(spec, window(0), 4, 0, s);
    const auto b = predict_noise(spec, window(8), 4, 8, s);
    DenoiserSpec anchored = spec;
    anchored.kind = DenoiserKind::crop_anchored;
    const auto a2 = predict_noise(anchored, window(0), 4, 0, s);
    const auto b2 = predict_noise(anchored, window(8), 4, 8, s);
    bool anchored_disagrees = false;
    for (std::size_t y = 0; y < 3; ++y) {
      for (std::size_t x = 8; x < 16; ++x) {
        for (std::size_t c = 0; c < 2; ++c) {
          CHECK(a.at(y, x, c) == b.at(y, x - 8, c));
          anchored_disagrees |= a2.at(y, x, c) != b2.at(y, x - 8, c);
        }
      }
    }
    CHECK(anchored_disagrees);
  }

  TEST_CASE("partial anchoring scales the exact prediction") {
    const auto s = build_linear_schedule(10, 0.01, 0.05);
    DenoiserSpec full;
    full.target = ramp(0.5);
    DenoiserSpec half = full;
    half.anchor_strength = 0.5;
    const LatentGrid z({1, 3, 1}, std::vector<double>{0.2, -0.4, 1.0});
    const auto a = predict_noise(full, z, 3, 1, s);
    const auto b = predict_noise(half, z, 3, 1, s);
    for (std::size_t i = 0; i < 3; ++i) CHECK(b.values()[i] == doctest::Approx(0.5 * a.values()[i]));
  }

  TEST_CASE("denoiser errors") {
    const auto s = build_linear_schedule(10, 0.01, 0.05);
    DenoiserSpec spec;
    const LatentGrid z({1, 2, 1}, 0.0);
    CHECK_THROWS_AS(predict_noise(spec, z, 0, 0, s), ConfigError);
    CHECK_THROWS_AS(predict_noise(spec, z, 11, 0, s), ConfigError);
    spec.anchor_strength = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    DenoiserSpec ext;
    ext.kind = DenoiserKind::external;
    CHECK_THROWS_AS(ext.validate(), ConfigError);
    CHECK_THROWS_AS(predict_noise(ext, z, 1, 0, s), ConfigError);
    CHECK(is_serial(ext));
    CHECK_FALSE(is_serial(DenoiserSpec{}));
  }
}
