#include "panofuse/schedule.hpp"

#include <cmath>
#include <string>

#include "panofuse/errors.hpp"

namespace panofuse {

NoiseSchedule::NoiseSchedule(std::vector<double> betas, std::vector<double> alpha_bars)
    : betas_(std::move(betas)), alpha_bars_(std::move(alpha_bars)) {}

NoiseSchedule NoiseSchedule::from_betas(std::vector<double> betas) {
  if (betas.empty()) {
    throw ConfigError("noise schedule needs at least one step");
  }
  std::vector<double> alpha_bars(betas.size() + 1);
  alpha_bars[0] = 1.0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double b = betas[i];
    if (!(b > 0.0 && b < 1.0)) {
      throw ConfigError("beta[" + std::to_string(i + 1) + "] = " + std::to_string(b) +
                        " is outside (0, 1)");
    }
    alpha_bars[i + 1] = alpha_bars[i] * (1.0 - b);
  }
  return NoiseSchedule(std::move(betas), std::move(alpha_bars));
}

double NoiseSchedule::beta(int t) const {
  if (t < 1 || t > steps()) {
    throw ConfigError("beta index " + std::to_string(t) + " outside [1, " +
                      std::to_string(steps()) + "]");
  }
  return betas_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha_bar(int t) const {
  if (t < 0 || t > steps()) {
    throw ConfigError("alpha_bar index " + std::to_string(t) + " outside [0, " +
                      std::to_string(steps()) + "]");
  }
  return alpha_bars_[static_cast<std::size_t>(t)];
}

NoiseSchedule build_linear_schedule(int steps, double beta_start, double beta_end) {
  if (steps < 1) {
    throw ConfigError("schedule step count must be >= 1");
  }
  if (!(beta_start > 0.0 && beta_end < 1.0)) {
    throw ConfigError("betas must lie in (0, 1)");
  }
  if (beta_start > beta_end) {
    throw ConfigError("beta_start must not exceed beta_end");
  }
  std::vector<double> betas(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    betas[static_cast<std::size_t>(i)] = beta_start + (beta_end - beta_start) * frac;
  }
  betas.back() = beta_end;
  if (steps == 1) betas.front() = beta_start;
  return NoiseSchedule::from_betas(std::move(betas));
}

DdimCoefficients ddim_coefficients(double alpha_bar_t, double alpha_bar_prev) {
  if (!(alpha_bar_t > 0.0 && alpha_bar_t <= 1.0 && alpha_bar_prev > 0.0 && alpha_bar_prev <= 1.0)) {
    throw ConfigError("cumulative alphas must lie in (0, 1]");
  }
  return {std::sqrt(alpha_bar_prev / alpha_bar_t),
          std::sqrt(1.0 / alpha_bar_prev - 1.0) - std::sqrt(1.0 / alpha_bar_t - 1.0)};
}

LatentGrid ddim_step(const LatentGrid& z_t, const LatentGrid& eps_hat, double alpha_bar_t,
                     double alpha_bar_prev) {
  require_same_shape(z_t, eps_hat, "ddim_step");
  require_finite(z_t, "ddim_step latent");
  require_finite(eps_hat, "ddim_step noise prediction");
  const auto [a, b] = ddim_coefficients(alpha_bar_t, alpha_bar_prev);
  LatentGrid out(z_t.shape());
  auto o = out.values();
  auto z = z_t.values();
  auto e = eps_hat.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = a * z[i] + b * e[i];
  }
  return out;
}

LatentGrid ddim_step(const LatentGrid& z_t, const LatentGrid& eps_hat, int t,
                     const NoiseSchedule& schedule) {
  if (t < 1 || t > schedule.steps()) {
    throw ConfigError("ddim_step timestep " + std::to_string(t) + " outside [1, " +
                      std::to_string(schedule.steps()) + "]");
  }
  return ddim_step(z_t, eps_hat, schedule.alpha_bar(t), schedule.alpha_bar(t - 1));
}

}  // namespace panofuse
