#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace panofuse {

struct GridShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  [[nodiscard]] std::size_t size() const { return height * width * channels; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

std::string to_string(const GridShape& shape);

/// Real-valued grid of shape (height, width, channels), stored row-major with
/// channels innermost. Used both for the panorama latent and for single crops.
class LatentGrid {
 public:
  LatentGrid() = default;
  explicit LatentGrid(GridShape shape, double fill = 0.0);
  LatentGrid(GridShape shape, std::vector<double> values);

  [[nodiscard]] const GridShape& shape() const { return shape_; }
  [[nodiscard]] std::size_t height() const { return shape_.height; }
  [[nodiscard]] std::size_t width() const { return shape_.width; }
  [[nodiscard]] std::size_t channels() const { return shape_.channels; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }

  [[nodiscard]] std::size_t index(std::size_t y, std::size_t x, std::size_t c) const {
    return (y * shape_.width + x) * shape_.channels + c;
  }
  double& at(std::size_t y, std::size_t x, std::size_t c) { return values_[index(y, x, c)]; }
  [[nodiscard]] double at(std::size_t y, std::size_t x, std::size_t c) const {
    return values_[index(y, x, c)];
  }

  std::span<double> values() { return values_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }

  [[nodiscard]] bool all_finite() const;

  friend bool operator==(const LatentGrid&, const LatentGrid&) = default;

 private:
  GridShape shape_;
  std::vector<double> values_;
};

void require_same_shape(const LatentGrid& a, const LatentGrid& b, std::string_view what);
void require_finite(const LatentGrid& grid, std::string_view what);

// Largest elementwise |a - b|; shapes must match.
double max_abs_diff(const LatentGrid& a, const LatentGrid& b);

}  // namespace panofuse
