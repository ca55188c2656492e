#include "panofuse/fusion.hpp"

#include <cmath>
#include <string>

#include "panofuse/errors.hpp"

namespace panofuse {

namespace {

void check_crop_shape(const LatentGrid& grid, const CropWindow& window, std::string_view what) {
  if (grid.height() != static_cast<std::size_t>(window.crop_h) ||
      grid.width() != static_cast<std::size_t>(window.crop_w)) {
    throw ConfigError(std::string(what) + ": grid " + to_string(grid.shape()) +
                      " does not match crop window " + std::to_string(window.index));
  }
}

}  // namespace

void FusionConfig::validate(int steps) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be a finite non-negative number");
  }
  if (tau < 0 || tau > steps) {
    throw ConfigError("tau must lie in [0, " + std::to_string(steps) + "]");
  }
}

bool fusion_active(const FusionConfig& cfg, int t) {
  return cfg.variant != FusionVariant::baseline && t > cfg.tau;
}

LatentGrid fuse_crop_pair(const LatentGrid& neighbor, const CropWindow& neighbor_window,
                          const LatentGrid& anchor, const CropWindow& window, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("fuse_crop_pair: lambda must be finite and non-negative");
  }
  if (!window.has_left_neighbor()) {
    throw ConfigError("fuse_crop_pair: crop " + std::to_string(window.index) +
                      " has no left overlap");
  }
  check_crop_shape(neighbor, neighbor_window, "fuse_crop_pair neighbor");
  check_crop_shape(anchor, window, "fuse_crop_pair anchor");
  if (neighbor.channels() != anchor.channels() || neighbor.height() != anchor.height()) {
    throw ConfigError("fuse_crop_pair: neighbor and crop disagree on height or channels");
  }
  const int shift = window.x_offset - neighbor_window.x_offset;
  if (shift <= 0 || window.left_overlap.end + shift > neighbor_window.crop_w) {
    throw ConfigError("fuse_crop_pair: left overlap of crop " + std::to_string(window.index) +
                      " is not covered by its neighbor");
  }

  LatentGrid out = anchor;
  const double inv = 1.0 / (1.0 + lambda);
  const std::size_t channels = anchor.channels();
  for (std::size_t y = 0; y < anchor.height(); ++y) {
    for (int x = window.left_overlap.begin; x < window.left_overlap.end; ++x) {
      const auto sx = static_cast<std::size_t>(x);
      const auto nx = static_cast<std::size_t>(x + shift);
      for (std::size_t c = 0; c < channels; ++c) {
        out.at(y, sx, c) = inv * (neighbor.at(y, nx, c) + lambda * anchor.at(y, sx, c));
      }
    }
  }
  return out;
}

LatentGrid fuse_weighted_average(std::span<const CropWindow> windows,
                                 std::span<const LatentGrid> crops, GridShape pano_shape) {
  if (windows.empty() || windows.size() != crops.size()) {
    throw ConfigError("fuse_weighted_average: need one crop per window and at least one crop");
  }
  const std::size_t channels = pano_shape.channels;
  LatentGrid numer(pano_shape);
  std::vector<double> denom(pano_shape.height * pano_shape.width, 0.0);

  for (std::size_t i = 0; i < windows.size(); ++i) {
    const CropWindow& w = windows[i];
    const LatentGrid& tile = crops[i];
    check_crop_shape(tile, w, "fuse_weighted_average");
    if (tile.channels() != channels || static_cast<std::size_t>(w.crop_h) != pano_shape.height ||
        static_cast<std::size_t>(w.x_offset + w.crop_w) > pano_shape.width || w.x_offset < 0) {
      throw ConfigError("fuse_weighted_average: crop " + std::to_string(w.index) +
                        " does not fit the panorama");
    }
    for (std::size_t y = 0; y < tile.height(); ++y) {
      for (std::size_t x = 0; x < tile.width(); ++x) {
        const double wt = w.weight_at(static_cast<int>(y), static_cast<int>(x));
        const std::size_t px = x + static_cast<std::size_t>(w.x_offset);
        denom[y * pano_shape.width + px] += wt;
        for (std::size_t c = 0; c < channels; ++c) {
          numer.at(y, px, c) += wt * tile.at(y, x, c);
        }
      }
    }
  }

  for (std::size_t y = 0; y < pano_shape.height; ++y) {
    for (std::size_t x = 0; x < pano_shape.width; ++x) {
      const double d = denom[y * pano_shape.width + x];
      if (!(d > 0.0)) {
        throw ConfigError("fuse_weighted_average: cell (" + std::to_string(y) + ", " +
                          std::to_string(x) + ") has zero total weight");
      }
      for (std::size_t c = 0; c < channels; ++c) numer.at(y, x, c) /= d;
    }
  }
  return numer;
}

std::vector<LatentGrid> twin_fusion_sweep(std::vector<LatentGrid> denoised, const TilePlan& plan,
                                          const FusionConfig& cfg, int t,
                                          std::span<const LatentGrid> fixed_refs) {
  if (denoised.size() != plan.windows.size()) {
    throw ConfigError("twin_fusion_sweep: " + std::to_string(denoised.size()) + " crops for " +
                      std::to_string(plan.windows.size()) + " windows");
  }
  if (!fusion_active(cfg, t)) return denoised;
  const bool fixed = cfg.variant == FusionVariant::twin_fixed_reference;
  if (fixed && fixed_refs.size() != denoised.size()) {
    throw ConfigError("twin_fusion_sweep: fixed-reference variant needs one reference per crop");
  }

  const std::vector<LatentGrid> raw =
      cfg.neighbor == NeighborSource::raw ? denoised : std::vector<LatentGrid>{};
  for (std::size_t i = 1; i < denoised.size(); ++i) {
    const CropWindow& w = plan.windows[i];
    if (!w.has_left_neighbor()) continue;
    const LatentGrid& neighbor = cfg.neighbor == NeighborSource::raw ? raw[i - 1] : denoised[i - 1];
    const LatentGrid& anchor = fixed ? fixed_refs[i] : denoised[i];
    denoised[i] = fuse_crop_pair(neighbor, plan.windows[i - 1], anchor, w, cfg.lambda);
  }
  return denoised;
}

}  // namespace panofuse
