#pragma once

#include <chrono>
#include <cstdint>
#include <string>

#include "panofuse/latent_grid.hpp"
#include "panofuse/schedule.hpp"

namespace panofuse {

enum class PatternKind { horizontal_ramp, checkerboard, smooth_noise };

/// Procedural stand-in for model-generated content. Values are a pure
/// function of the parameters and absolute panorama coordinates.
struct PatternSpec {
  PatternKind kind = PatternKind::horizontal_ramp;
  double slope = 1.0 / 64.0;  // ramp: value = intercept + slope * x
  double intercept = 0.0;
  int cell = 8;               // checkerboard cell / noise lattice spacing
  std::uint64_t seed = 0;     // smooth_noise
  double amplitude = 1.0;     // checkerboard and smooth_noise range
};

LatentGrid sample_pattern(const PatternSpec& pattern, int x_offset, GridShape shape);

enum class DenoiserKind { exact_noise, crop_anchored, constant, external };

struct DenoiserSpec {
  DenoiserKind kind = DenoiserKind::exact_noise;
  PatternSpec target;
  std::string condition;  // opaque; only the external denoiser sees it
  std::chrono::microseconds simulated_cost{0};
  double constant_value = 0.0;
  // Fraction of the clean-sample estimate drawn from the target. 1 gives the
  // exact forward-noise inverse; below 1 the estimate keeps part of the input's
  // own content, so the final sample depends on the trajectory.
  double anchor_strength = 1.0;

  void validate() const;
};

/// Noise prediction for a crop whose left edge sits at x_offset.
///   exact_noise:   (z - sqrt(ab_t) G(x_offset)) / sqrt(1 - ab_t), scaled by anchor_strength
///   crop_anchored: same with G sampled at offset 0, so neighbours disagree on overlaps
///   constant:      constant_value everywhere
///   external:      forwarded to the registered host callback
LatentGrid predict_noise(const DenoiserSpec& spec, const LatentGrid& z_t, int t, int x_offset,
                         const NoiseSchedule& schedule);

/// True when calls must not be issued concurrently.
bool is_serial(const DenoiserSpec& spec);

}  // namespace panofuse
