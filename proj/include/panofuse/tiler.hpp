#pragma once

#include <cstdint>
#include <vector>

#include "panofuse/latent_grid.hpp"

namespace panofuse {

enum class Weighting { uniform, gaussian };

/// Half-open column interval [begin, end) in crop-local coordinates.
struct ColumnRange {
  int begin = 0;
  int end = 0;

  [[nodiscard]] bool empty() const { return end <= begin; }
  [[nodiscard]] int size() const { return empty() ? 0 : end - begin; }
  [[nodiscard]] bool contains(int col) const { return col >= begin && col < end; }
  friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

/// One crop of the panorama. The left/right overlap masks are column bands
/// covering the full overlap with the previous/next window: [0, crop_w - s_v)
/// and [s_v, crop_w) at regular spacing, wider next to clamped lead/tail
/// windows, empty when the crop has no neighbor on that side.
struct CropWindow {
  int index = 1;  // 1-based position in the plan
  int x_offset = 0;
  int crop_h = 0;
  int crop_w = 0;
  ColumnRange left_overlap;
  ColumnRange right_overlap;
  std::vector<double> weight;  // crop_h * crop_w, row-major

  [[nodiscard]] bool has_left_neighbor() const { return !left_overlap.empty(); }
  [[nodiscard]] double weight_at(int y, int x) const {
    return weight[static_cast<std::size_t>(y) * static_cast<std::size_t>(crop_w) +
                  static_cast<std::size_t>(x)];
  }
  // Materialized binary masks, crop_h * crop_w row-major.
  [[nodiscard]] std::vector<std::uint8_t> left_mask() const;
  [[nodiscard]] std::vector<std::uint8_t> right_mask() const;
};

struct TileGeometry {
  int pano_h = 64;
  int pano_w = 256;
  int crop_h = 64;
  int crop_w = 64;
  int view_stride = 16;
  int cross_stride = 8;
  int interleave = 1;
  Weighting weighting = Weighting::uniform;

  void validate() const;
};

struct TilePlan {
  int mode_k = 0;
  TileGeometry geometry;
  std::vector<CropWindow> windows;  // strictly increasing x_offset

  [[nodiscard]] std::size_t size() const { return windows.size(); }
};

/// Sliding-window plan for sampling mode k. Interior offsets are
/// k*s_r + j*s_v (j over all integers) inside [0, pano_w - crop_w]; windows
/// clamped to 0 and to pano_w - crop_w are added when the shifted grid leaves
/// either edge uncovered.
TilePlan build_tile_plan(const TileGeometry& geometry, int mode_k);

/// One plan per interleave mode, indexed by k.
std::vector<TilePlan> build_plan_cycle(const TileGeometry& geometry);

LatentGrid crop(const LatentGrid& panorama, const CropWindow& window);
void paste(LatentGrid& panorama, const LatentGrid& tile, const CropWindow& window);

/// Cross Sampling mode selection: t mod r.
int mode_for_timestep(int t, int interleave);

}  // namespace panofuse
