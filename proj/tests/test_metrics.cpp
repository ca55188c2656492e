#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "panofuse/errors.hpp"
#include "panofuse/metrics.hpp"

using namespace panofuse;

namespace {

LatentGrid ramp_grid(GridShape shape, double slope) {
  LatentGrid g(shape);
  for (std::size_t y = 0; y < shape.height; ++y)
    for (std::size_t x = 0; x < shape.width; ++x)
      for (std::size_t c = 0; c < shape.channels; ++c) g.at(y, x, c) = slope * static_cast<double>(x);
  return g;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("constant grid has ratio 1") {
    const auto plan = build_tile_plan(TileGeometry{4, 64, 4, 16, 8, 1, 1, Weighting::uniform}, 0);
    const auto report = seam_report(LatentGrid({4, 64, 2}, 3.5), plan);
    CHECK(report.seam_ratio == 1.0);
    CHECK(report.boundary_discontinuity == 0.0);
    CHECK_FALSE(report.boundary_columns.empty());
  }

  TEST_CASE("linear ramp has equal boundary and background discontinuity") {
    const auto plan = build_tile_plan(TileGeometry{4, 64, 4, 16, 8, 1, 1, Weighting::uniform}, 0);
    const auto report = seam_report(ramp_grid({4, 64, 2}, 0.3), plan);
    CHECK(std::abs(report.seam_ratio - 1.0) <= 1e-9);
  }

  TEST_CASE("hand-computed step on an 8-column grid") {
    // Windows at 0 and 2 of width 6: interior edges at columns 2 and 6.
    const auto plan = build_tile_plan(TileGeometry{1, 8, 1, 6, 2, 1, 1, Weighting::uniform}, 0);
    REQUIRE(plan.size() == 2);
    LatentGrid g({1, 8, 1});
    for (std::size_t x = 0; x < 8; ++x) g.at(0, x, 0) = 0.01 * static_cast<double>(x) + (x >= 2 ? 1.0 : 0.0);
    const auto report = seam_report(g, plan);
    CHECK(report.boundary_columns == std::vector<int>{2, 6});
    // Boundary differences: columns 1,2,3,5,6,7 -> 0.01, 1.01, 0.01, 0.01, 0.01, 0.01.
    CHECK(report.boundary_discontinuity == doctest::Approx(1.06 / 6.0).epsilon(1e-12));
    CHECK(report.background_discontinuity == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(report.seam_ratio == doctest::Approx(1.06 / 6.0 / 0.01).epsilon(1e-12));
  }

  TEST_CASE("ratio conventions for degenerate inputs") {
    const auto single = build_tile_plan(TileGeometry{1, 8, 1, 8, 1, 1, 1, Weighting::uniform}, 0);
    const auto report = seam_report(ramp_grid({1, 8, 1}, 1.0), single);
    CHECK(report.boundary_columns.empty());
    CHECK(report.seam_ratio == 1.0);

    const auto plan = build_tile_plan(TileGeometry{1, 8, 1, 6, 2, 1, 1, Weighting::uniform}, 0);
    LatentGrid step({1, 8, 1}, 0.0);
    for (std::size_t x = 2; x < 8; ++x) step.at(0, x, 0) = 1.0;
    // Background {4} is flat: the floor keeps the ratio finite and large.
    const auto flat = seam_report(step, plan);
    CHECK(flat.background_discontinuity == 0.0);
    CHECK(std::isfinite(flat.seam_ratio));
    CHECK(flat.seam_ratio > 1e6);
    CHECK_THROWS_AS(seam_report(LatentGrid({1, 1, 1}), single), ConfigError);
  }

  TEST_CASE("overlap residual") {
    const auto plan = build_tile_plan(TileGeometry{1, 6, 1, 4, 2, 1, 1, Weighting::uniform}, 0);
    REQUIRE(plan.size() == 2);
    LatentGrid pano({1, 6, 1});
    for (std::size_t x = 0; x < 6; ++x) pano.at(0, x, 0) = static_cast<double>(x * x);
    std::vector<LatentGrid> same{crop(pano, plan.windows[0]), crop(pano, plan.windows[1])};
    CHECK(overlap_residual(same, plan) == 0.0);
    // Overlap is 2 cells wide; shift the second crop by 1.0 everywhere.
    auto shifted = same;
    for (double& v : shifted[1].values()) v += 1.0;
    CHECK(overlap_residual(shifted, plan) == 2.0);
    CHECK(pair_overlap_residual(shifted[0], plan.windows[0], shifted[1], plan.windows[1]) == 2.0);
    CHECK_THROWS_AS(overlap_residual(std::vector{same[0]}, plan), ConfigError);
  }

  TEST_CASE("time_run picks the median run") {
    int n = 0;
    const auto pick = time_run(
        [&] {
          RunTiming t;
          const double totals[] = {3.0, 1.0, 2.0, 5.0};
          t.total_seconds = totals[n++];
          return t;
        },
        4);
    CHECK(n == 4);
    CHECK(pick.total_seconds == 2.0);
    int m = 0;
    const auto one = time_run(
        [&] {
          RunTiming t;
          t.total_seconds = 7.0;
          t.denoiser_calls = ++m;
          return t;
        },
        1);
    CHECK(one.total_seconds == 7.0);
    CHECK(one.denoiser_calls == 1);
    CHECK_THROWS_AS(time_run([] { return RunTiming{}; }, 0), ConfigError);
  }

  TEST_CASE("csv writers") {
    SeamReport s;
    s.boundary_columns = {16, 32};
    s.boundary_discontinuity = 0.5;
    s.background_discontinuity = 0.25;
    s.seam_ratio = 2.0;
    std::ostringstream a;
    write_seam_csv(a, s);
    std::string header;
    std::istringstream ai(a.str());
    std::getline(ai, header);
    CHECK(header == "boundary_columns,boundary_discontinuity,background_discontinuity,seam_ratio");
    std::string row;
    std::getline(ai, row);
    CHECK(row.rfind("16 32,", 0) == 0);

    RunTiming t;
    t.timesteps = {2, 1};
    t.crops_per_step = {3, 4};
    t.calls_per_step = {6, 4};
    t.step_seconds = {0.1, 0.2};
    std::ostringstream b;
    write_timing_csv(b, t);
    std::istringstream bi(b.str());
    std::getline(bi, header);
    CHECK(header == "timestep,crops,calls,seconds");
    int lines = 0;
    for (std::string line; std::getline(bi, line);) ++lines;
    CHECK(lines == 2);
  }
}
