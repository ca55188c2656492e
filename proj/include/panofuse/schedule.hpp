#pragma once

#include <span>
#include <vector>

#include "panofuse/latent_grid.hpp"

namespace panofuse {

/// Diffusion noise schedule. betas are indexed 1..T, alpha_bars 0..T with
/// alpha_bars[0] == 1 so the last DDIM step lands on the clean sample.
/// Immutable after construction.
class NoiseSchedule {
 public:
  static NoiseSchedule from_betas(std::vector<double> betas);

  [[nodiscard]] int steps() const { return static_cast<int>(betas_.size()); }
  [[nodiscard]] double beta(int t) const;
  [[nodiscard]] double alpha_bar(int t) const;
  [[nodiscard]] std::span<const double> betas() const { return betas_; }
  [[nodiscard]] std::span<const double> alpha_bars() const { return alpha_bars_; }

 private:
  NoiseSchedule(std::vector<double> betas, std::vector<double> alpha_bars);

  std::vector<double> betas_;
  std::vector<double> alpha_bars_;
};

/// Betas linearly spaced from beta_start to beta_end inclusive.
NoiseSchedule build_linear_schedule(int steps, double beta_start, double beta_end);

struct DdimCoefficients {
  double sample;  // multiplies z_t
  double noise;   // multiplies the predicted noise
};

DdimCoefficients ddim_coefficients(double alpha_bar_t, double alpha_bar_prev);

/// One deterministic DDIM update from t to t-1:
///   sqrt(ab[t-1]/ab[t]) * z + (sqrt(1/ab[t-1] - 1) - sqrt(1/ab[t] - 1)) * eps
LatentGrid ddim_step(const LatentGrid& z_t, const LatentGrid& eps_hat, int t,
                     const NoiseSchedule& schedule);

// Same update with explicit cumulative alphas; lets callers evaluate degenerate
// (flat) schedules that NoiseSchedule itself rejects.
LatentGrid ddim_step(const LatentGrid& z_t, const LatentGrid& eps_hat, double alpha_bar_t,
                     double alpha_bar_prev);

}  // namespace panofuse
