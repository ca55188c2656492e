#include "panofuse/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "panofuse/errors.hpp"
#include "panofuse/noise.hpp"

namespace panofuse {

void RunConfig::validate() const {
  if (channels < 1) throw ConfigError("channels must be >= 1");
  if (crop_h > pano_h || crop_w > pano_w) {
    throw ConfigError("crop dimensions must not exceed panorama dimensions");
  }
  if (cross_stride > view_stride) {
    throw ConfigError("cross stride must not exceed view stride");
  }
  if (parallel_workers < 1) throw ConfigError("parallel_workers must be >= 1");
  if (output.stem.empty()) throw ConfigError("output stem must not be empty");
  geometry().validate();
  if (mode == RunMode::twin_pair && view_stride >= crop_w) {
    throw ConfigError("twin pair needs view stride < crop width so the crops share columns");
  }
  (void)noise_schedule();
  fusion.validate(schedule.steps);
  denoiser.validate();
}

TileGeometry RunConfig::geometry() const {
  return TileGeometry{pano_h,       pano_w,     crop_h,          crop_w,
                      view_stride, cross_stride, interleave, fusion.weighting};
}

GridShape RunConfig::pano_shape() const {
  return GridShape{static_cast<std::size_t>(pano_h), static_cast<std::size_t>(pano_w),
                   static_cast<std::size_t>(channels)};
}

NoiseSchedule RunConfig::noise_schedule() const {
  return build_linear_schedule(schedule.steps, schedule.beta_start, schedule.beta_end);
}

namespace {

using Clock = std::chrono::steady_clock;

// Runs fn(i) for i in [0, n). On failure rethrows the exception of the lowest
// failing index, so error reports do not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    pool.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

LatentGrid denoise_one(const RunConfig& cfg, const NoiseSchedule& schedule, const LatentGrid& z,
                       int t, int x_offset, int crop_index) {
  try {
    const LatentGrid eps = predict_noise(cfg.denoiser, z, t, x_offset, schedule);
    return ddim_step(z, eps, t, schedule);
  } catch (const DenoiserError&) {
    throw;
  } catch (const ReplyShapeError& e) {
    throw DenoiserError(crop_index, t, e.what(), DenoiserError::Kind::reply_shape);
  } catch (const std::exception& e) {
    throw DenoiserError(crop_index, t, e.what());
  }
}

std::vector<LatentGrid> denoise_crops(const RunConfig& cfg, const NoiseSchedule& schedule,
                                      const LatentGrid& panorama, const TilePlan& plan, int t,
                                      int workers) {
  std::vector<LatentGrid> out(plan.windows.size());
  parallel_for(plan.windows.size(), workers, [&](std::size_t i) {
    const CropWindow& w = plan.windows[i];
    out[i] = denoise_one(cfg, schedule, crop(panorama, w), t, w.x_offset, w.index);
  });
  return out;
}

int effective_workers(const RunConfig& cfg) {
  return is_serial(cfg.denoiser) ? 1 : cfg.parallel_workers;
}

}  // namespace

PanoramaResult generate_panorama(const RunConfig& cfg) {
  cfg.validate();
  const NoiseSchedule schedule = cfg.noise_schedule();
  const std::vector<TilePlan> plans = build_plan_cycle(cfg.geometry());
  const GridShape shape = cfg.pano_shape();
  const int workers = effective_workers(cfg);
  const bool fixed_reference = cfg.fusion.variant == FusionVariant::twin_fixed_reference;
  const int steps = schedule.steps();

  PanoramaResult result;
  result.residual_by_timestep.assign(static_cast<std::size_t>(steps) + 1, 0.0);

  LatentGrid z = gaussian_field(shape, cfg.seed);
  // Unfused trajectory that supplies the constant references of the stress variant.
  LatentGrid reference = fixed_reference ? z : LatentGrid{};

  const auto run_start = Clock::now();
  for (int t = steps; t >= 1; --t) {
    const auto step_start = Clock::now();
    const TilePlan& plan = plans[static_cast<std::size_t>(mode_for_timestep(t, cfg.interleave))];
    std::vector<LatentGrid> crops = denoise_crops(cfg, schedule, z, plan, t, workers);
    int calls = static_cast<int>(plan.size());

    std::vector<LatentGrid> refs;
    if (fixed_reference && fusion_active(cfg.fusion, t)) {
      refs = denoise_crops(cfg, schedule, reference, plan, t, workers);
      calls += static_cast<int>(plan.size());
      reference = fuse_weighted_average(plan.windows, refs, shape);
    }

    crops = twin_fusion_sweep(std::move(crops), plan, cfg.fusion, t, refs);
    result.residual_by_timestep[static_cast<std::size_t>(t)] = overlap_residual(crops, plan);
    z = fuse_weighted_average(plan.windows, crops, shape);

    const std::chrono::duration<double> elapsed = Clock::now() - step_start;
    result.timing.timesteps.push_back(t);
    result.timing.crops_per_step.push_back(static_cast<int>(plan.size()));
    result.timing.calls_per_step.push_back(calls);
    result.timing.step_seconds.push_back(elapsed.count());
    result.timing.denoiser_calls += calls;
  }
  const std::chrono::duration<double> total = Clock::now() - run_start;
  result.timing.total_seconds = total.count();

  result.seams = seam_report(z, plans.front());
  result.panorama = std::move(z);
  return result;
}

double residual_at_tau(const PanoramaResult& result, int tau) {
  const int steps = static_cast<int>(result.residual_by_timestep.size()) - 1;
  if (steps < 1 || tau < 0) throw ConfigError("residual_at_tau: no residual trace or negative tau");
  return result.residual_by_timestep[static_cast<std::size_t>(std::min(tau + 1, steps))];
}

TwinPairResult generate_twin_pair(const RunConfig& cfg, bool keep_trajectories) {
  cfg.validate();
  const NoiseSchedule schedule = cfg.noise_schedule();
  TileGeometry geometry = cfg.geometry();
  geometry.pano_h = cfg.crop_h;
  geometry.pano_w = cfg.crop_w + cfg.view_stride;
  geometry.interleave = 1;
  const TilePlan plan = build_tile_plan(geometry, 0);
  if (plan.size() != 2 || !plan.windows[1].has_left_neighbor()) {
    throw ConfigError("twin pair needs two crops with a shared overlap");
  }

  TwinPairResult result;
  result.first_window = plan.windows[0];
  result.second_window = plan.windows[1];
  const CropWindow& w1 = result.first_window;
  const CropWindow& w2 = result.second_window;

  const GridShape shape{static_cast<std::size_t>(geometry.pano_h),
                        static_cast<std::size_t>(geometry.pano_w),
                        static_cast<std::size_t>(cfg.channels)};
  const LatentGrid noise = gaussian_field(shape, cfg.seed);
  LatentGrid first = crop(noise, w1);
  LatentGrid second_raw = crop(noise, w2);
  LatentGrid second_fused = second_raw;
  if (keep_trajectories) {
    result.first_trajectory.push_back(first);
    result.second_fused_trajectory.push_back(second_fused);
  }

  const bool fixed_reference = cfg.fusion.variant == FusionVariant::twin_fixed_reference;
  for (int t = schedule.steps(); t >= 1; --t) {
    first = denoise_one(cfg, schedule, first, t, w1.x_offset, w1.index);
    second_raw = denoise_one(cfg, schedule, second_raw, t, w2.x_offset, w2.index);
    LatentGrid denoised = denoise_one(cfg, schedule, second_fused, t, w2.x_offset, w2.index);
    if (fusion_active(cfg.fusion, t)) {
      const LatentGrid& anchor = fixed_reference ? second_raw : denoised;
      second_fused = fuse_crop_pair(first, w1, anchor, w2, cfg.fusion.lambda);
    } else {
      second_fused = std::move(denoised);
    }
    if (keep_trajectories) {
      result.first_trajectory.push_back(first);
      result.second_fused_trajectory.push_back(second_fused);
    }
  }
  result.first = std::move(first);
  result.second_raw = std::move(second_raw);
  result.second_fused = std::move(second_fused);
  return result;
}

double twin_overlap_mismatch(const TwinPairResult& result, const LatentGrid& second) {
  return std::sqrt(
      pair_overlap_residual(result.first, result.first_window, second, result.second_window));
}

}  // namespace panofuse
