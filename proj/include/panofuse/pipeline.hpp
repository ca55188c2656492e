#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panofuse/denoiser.hpp"
#include "panofuse/fusion.hpp"
#include "panofuse/latent_grid.hpp"
#include "panofuse/metrics.hpp"
#include "panofuse/schedule.hpp"
#include "panofuse/tiler.hpp"

namespace panofuse {

enum class RunMode { panorama, twin_pair };

struct ScheduleParams {
  int steps = 50;
  double beta_start = 0.00085;
  double beta_end = 0.012;
};

struct OutputPaths {
  std::string dir = "out";
  std::string stem = "panorama";
};

struct RunConfig {
  int pano_h = 64;
  int pano_w = 256;
  int crop_h = 64;
  int crop_w = 64;
  int channels = 4;
  ScheduleParams schedule;
  int view_stride = 16;
  int cross_stride = 8;
  int interleave = 2;
  FusionConfig fusion;
  DenoiserSpec denoiser;
  std::uint64_t seed = 0;
  OutputPaths output;
  RunMode mode = RunMode::panorama;
  int parallel_workers = 1;

  void validate() const;
  [[nodiscard]] TileGeometry geometry() const;
  [[nodiscard]] GridShape pano_shape() const;
  [[nodiscard]] NoiseSchedule noise_schedule() const;
};

struct PanoramaResult {
  LatentGrid panorama;
  SeamReport seams;
  RunTiming timing;
  // residual_by_timestep[t]: overlap residual of the crops produced at step t
  // (after the fusion sweep, before composition). Index 0 is unused.
  std::vector<double> residual_by_timestep;
};

PanoramaResult generate_panorama(const RunConfig& cfg);

/// Overlap residual of the crops that form z_tau, i.e. the output of the last
/// step at which crop fusion may run (t = tau + 1, capped at T).
double residual_at_tau(const PanoramaResult& result, int tau);

struct TwinPairResult {
  LatentGrid first;          // I_1
  LatentGrid second_raw;     // I_2, denoised independently
  LatentGrid second_fused;   // I_2*, fused against I_1 while t > tau
  CropWindow first_window;
  CropWindow second_window;
  // Per-step states, index 0 = initial noise, index s = after s steps.
  std::vector<LatentGrid> first_trajectory;
  std::vector<LatentGrid> second_fused_trajectory;
};

/// Two crops cut from one noise field at offsets 0 and s_v, so the right
/// overlap of the first equals the left overlap of the second at t = T.
TwinPairResult generate_twin_pair(const RunConfig& cfg, bool keep_trajectories = false);

/// Mismatch between the right overlap of `first` and the left overlap of
/// `second` (root of the summed squares).
double twin_overlap_mismatch(const TwinPairResult& result, const LatentGrid& second);

}  // namespace panofuse
