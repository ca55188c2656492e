#include "panofuse/denoiser.hpp"

#include <cmath>
#include <thread>

#include "panofuse/errors.hpp"
#include "panofuse/external.hpp"

namespace panofuse {

DenoiserError::DenoiserError(int crop_index, int timestep, const std::string& detail, Kind kind)
    : std::runtime_error("denoiser failed at crop " + std::to_string(crop_index) + ", timestep " +
                         std::to_string(timestep) + ": " + detail),
      crop_index_(crop_index),
      timestep_(timestep),
      kind_(kind),
      detail_(detail) {}

void DenoiserSpec::validate() const {
  if (!(anchor_strength > 0.0 && anchor_strength <= 1.0)) {
    throw ConfigError("denoiser anchor_strength must lie in (0, 1]");
  }
  if (simulated_cost.count() < 0) {
    throw ConfigError("simulated cost must be non-negative");
  }
  if (!std::isfinite(constant_value)) {
    throw ConfigError("constant denoiser value must be finite");
  }
  if (kind == DenoiserKind::external && !external_denoiser_registered()) {
    throw ConfigError("external denoiser requested but no host callback is registered");
  }
}

bool is_serial(const DenoiserSpec& spec) { return spec.kind == DenoiserKind::external; }

namespace {

LatentGrid forward_noise_inverse(const DenoiserSpec& spec, const LatentGrid& z_t, int t,
                                 int pattern_offset, const NoiseSchedule& schedule) {
  const LatentGrid target = sample_pattern(spec.target, pattern_offset, z_t.shape());
  const double ab = schedule.alpha_bar(t);
  const double sqrt_ab = std::sqrt(ab);
  const double denom = std::sqrt(1.0 - ab);
  LatentGrid eps(z_t.shape());
  auto out = eps.values();
  auto z = z_t.values();
  auto g = target.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double residual = z[i] - sqrt_ab * g[i];
    if (denom == 0.0) {
      if (residual != 0.0) {
        throw ConfigError("noise prediction undefined: alpha_bar == 1 with latent off target");
      }
      out[i] = 0.0;
    } else {
      out[i] = spec.anchor_strength * residual / denom;
    }
  }
  return eps;
}

}  // namespace

LatentGrid predict_noise(const DenoiserSpec& spec, const LatentGrid& z_t, int t, int x_offset,
                         const NoiseSchedule& schedule) {
  if (t < 1 || t > schedule.steps()) {
    throw ConfigError("predict_noise timestep " + std::to_string(t) + " out of range");
  }
  require_finite(z_t, "predict_noise input");
  if (spec.kind != DenoiserKind::external && spec.simulated_cost.count() > 0) {
    std::this_thread::sleep_for(spec.simulated_cost);
  }
  switch (spec.kind) {
    case DenoiserKind::exact_noise:
      return forward_noise_inverse(spec, z_t, t, x_offset, schedule);
    case DenoiserKind::crop_anchored:
      return forward_noise_inverse(spec, z_t, t, 0, schedule);
    case DenoiserKind::constant:
      return LatentGrid(z_t.shape(), spec.constant_value);
    case DenoiserKind::external:
      return call_external_denoiser(z_t, t, x_offset, spec.condition);
  }
  throw ConfigError("unknown denoiser kind");
}

}  // namespace panofuse
