#include "panofuse/tiler.hpp"

#include <cmath>
#include <string>

#include "panofuse/errors.hpp"

namespace panofuse {

namespace {

std::vector<std::uint8_t> band_mask(const CropWindow& w, const ColumnRange& band) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w.crop_h) *
                                 static_cast<std::size_t>(w.crop_w));
  for (int y = 0; y < w.crop_h; ++y) {
    for (int x = 0; x < w.crop_w; ++x) {
      mask[static_cast<std::size_t>(y) * static_cast<std::size_t>(w.crop_w) +
           static_cast<std::size_t>(x)] = band.contains(x) ? 1 : 0;
    }
  }
  return mask;
}

std::vector<double> make_weights(int h, int w, Weighting mode) {
  std::vector<double> weight(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), 1.0);
  if (mode == Weighting::uniform) return weight;
  const double cx = 0.5 * (w - 1);
  const double cy = 0.5 * (h - 1);
  const double sx = 0.25 * w;
  const double sy = 0.25 * h;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = (x - cx) / sx;
      const double dy = (y - cy) / sy;
      weight[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
             static_cast<std::size_t>(x)] = std::exp(-0.5 * (dx * dx + dy * dy));
    }
  }
  return weight;
}

void check_window(const LatentGrid& panorama, const CropWindow& window) {
  if (window.crop_h <= 0 || window.crop_w <= 0 || window.x_offset < 0 ||
      static_cast<std::size_t>(window.crop_h) != panorama.height() ||
      static_cast<std::size_t>(window.x_offset + window.crop_w) > panorama.width()) {
    throw ConfigError("crop window at offset " + std::to_string(window.x_offset) + " (" +
                      std::to_string(window.crop_h) + "x" + std::to_string(window.crop_w) +
                      ") does not fit panorama " + to_string(panorama.shape()));
  }
}

}  // namespace

std::vector<std::uint8_t> CropWindow::left_mask() const { return band_mask(*this, left_overlap); }
std::vector<std::uint8_t> CropWindow::right_mask() const { return band_mask(*this, right_overlap); }

void TileGeometry::validate() const {
  if (pano_h < 1 || pano_w < 1 || crop_h < 1 || crop_w < 1) {
    throw ConfigError("panorama and crop dimensions must be positive");
  }
  if (crop_w > pano_w) {
    throw ConfigError("crop width " + std::to_string(crop_w) + " exceeds panorama width " +
                      std::to_string(pano_w));
  }
  if (crop_h != pano_h) {
    throw ConfigError("only a single row of crops is supported: crop height must equal panorama height");
  }
  if (view_stride < 1 || cross_stride < 1 || interleave < 1) {
    throw ConfigError("view stride, cross stride and interleave count must be >= 1");
  }
  if (pano_w > crop_w && view_stride > crop_w) {
    throw ConfigError("view stride must not exceed the crop width");
  }
  if (pano_w > crop_w && view_stride == crop_w) {
    throw ConfigError("view stride equal to the crop width leaves adjacent crops without overlap");
  }
}

TilePlan build_tile_plan(const TileGeometry& geometry, int mode_k) {
  geometry.validate();
  if (mode_k < 0 || mode_k >= geometry.interleave) {
    throw ConfigError("sampling mode " + std::to_string(mode_k) + " outside [0, " +
                      std::to_string(geometry.interleave) + ")");
  }
  const int max_offset = geometry.pano_w - geometry.crop_w;
  const int s_v = geometry.view_stride;

  std::vector<int> offsets;
  if (max_offset > 0) {
    // Offsets k*s_r + j*s_v for every integer j; the smallest non-negative one
    // starts the sequence.
    const long long shift = static_cast<long long>(mode_k) * geometry.cross_stride;
    const int start = static_cast<int>(shift % s_v);
    if (start != 0) offsets.push_back(0);
    for (int off = start; off <= max_offset; off += s_v) offsets.push_back(off);
    if (offsets.back() != max_offset) offsets.push_back(max_offset);
  } else {
    offsets.push_back(0);
  }

  TilePlan plan;
  plan.mode_k = mode_k;
  plan.geometry = geometry;
  const auto weights = make_weights(geometry.crop_h, geometry.crop_w, geometry.weighting);
  const int n = static_cast<int>(offsets.size());
  plan.windows.reserve(offsets.size());
  for (int i = 0; i < n; ++i) {
    CropWindow w;
    w.index = i + 1;
    w.x_offset = offsets[static_cast<std::size_t>(i)];
    w.crop_h = geometry.crop_h;
    w.crop_w = geometry.crop_w;
    // Each band is the full overlap with the adjacent window; s_v wide spacing
    // gives crop_w - s_v columns, clamped lead/tail windows overlap more.
    if (i > 0) {
      w.left_overlap = {0, offsets[static_cast<std::size_t>(i - 1)] + geometry.crop_w - w.x_offset};
    }
    if (i + 1 < n) w.right_overlap = {offsets[static_cast<std::size_t>(i + 1)] - w.x_offset, geometry.crop_w};
    w.weight = weights;
    plan.windows.push_back(std::move(w));
  }
  return plan;
}

std::vector<TilePlan> build_plan_cycle(const TileGeometry& geometry) {
  std::vector<TilePlan> plans;
  plans.reserve(static_cast<std::size_t>(geometry.interleave));
  for (int k = 0; k < geometry.interleave; ++k) plans.push_back(build_tile_plan(geometry, k));
  return plans;
}

LatentGrid crop(const LatentGrid& panorama, const CropWindow& window) {
  check_window(panorama, window);
  const std::size_t c = panorama.channels();
  LatentGrid out(GridShape{static_cast<std::size_t>(window.crop_h),
                           static_cast<std::size_t>(window.crop_w), c});
  const std::size_t row_len = static_cast<std::size_t>(window.crop_w) * c;
  for (std::size_t y = 0; y < out.height(); ++y) {
    const auto src = panorama.values().subspan(
        panorama.index(y, static_cast<std::size_t>(window.x_offset), 0), row_len);
    std::copy(src.begin(), src.end(), out.values().begin() +
                                          static_cast<std::ptrdiff_t>(out.index(y, 0, 0)));
  }
  return out;
}

void paste(LatentGrid& panorama, const LatentGrid& tile, const CropWindow& window) {
  check_window(panorama, window);
  if (tile.height() != static_cast<std::size_t>(window.crop_h) ||
      tile.width() != static_cast<std::size_t>(window.crop_w) ||
      tile.channels() != panorama.channels()) {
    throw ConfigError("paste: tile shape " + to_string(tile.shape()) +
                      " does not match its window");
  }
  const std::size_t row_len = tile.width() * tile.channels();
  for (std::size_t y = 0; y < tile.height(); ++y) {
    const auto src = tile.values().subspan(tile.index(y, 0, 0), row_len);
    std::copy(src.begin(), src.end(),
              panorama.values().begin() +
                  static_cast<std::ptrdiff_t>(
                      panorama.index(y, static_cast<std::size_t>(window.x_offset), 0)));
  }
}

int mode_for_timestep(int t, int interleave) {
  if (interleave < 1 || t < 0) {
    throw ConfigError("mode_for_timestep needs t >= 0 and r >= 1");
  }
  return t % interleave;
}

}  // namespace panofuse
