#include "panofuse/latent_grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "panofuse/errors.hpp"

namespace panofuse {

std::string to_string(const GridShape& shape) {
  std::ostringstream os;
  os << shape.height << "x" << shape.width << "x" << shape.channels;
  return os.str();
}

LatentGrid::LatentGrid(GridShape shape, double fill) : shape_(shape) {
  if (shape.height == 0 || shape.width == 0 || shape.channels == 0) {
    throw ConfigError("LatentGrid dimensions must be positive, got " + to_string(shape));
  }
  values_.assign(shape.size(), fill);
}

LatentGrid::LatentGrid(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (shape.height == 0 || shape.width == 0 || shape.channels == 0) {
    throw ConfigError("LatentGrid dimensions must be positive, got " + to_string(shape));
  }
  if (values_.size() != shape.size()) {
    throw ConfigError("LatentGrid of shape " + to_string(shape) + " needs " +
                      std::to_string(shape.size()) + " values, got " +
                      std::to_string(values_.size()));
  }
}

bool LatentGrid::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_shape(const LatentGrid& a, const LatentGrid& b, std::string_view what) {
  if (a.shape() != b.shape()) {
    throw ConfigError(std::string(what) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                      to_string(b.shape()));
  }
}

void require_finite(const LatentGrid& grid, std::string_view what) {
  if (!grid.all_finite()) {
    throw ConfigError(std::string(what) + ": non-finite value");
  }
}

double max_abs_diff(const LatentGrid& a, const LatentGrid& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    worst = std::max(worst, std::abs(av[i] - bv[i]));
  }
  return worst;
}

}  // namespace panofuse
