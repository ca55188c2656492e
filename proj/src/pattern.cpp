#include <cmath>
#include <string>

#include "panofuse/denoiser.hpp"
#include "panofuse/errors.hpp"
#include "panofuse/noise.hpp"

namespace panofuse {

namespace {

double lattice_value(const PatternSpec& p, std::size_t channel, long long ly, long long lx) {
  const std::uint64_t row_key =
      counter_hash(p.seed, static_cast<std::uint64_t>(channel) * 0x100000001ULL +
                               static_cast<std::uint64_t>(ly));
  return p.amplitude * (2.0 * counter_uniform(row_key, static_cast<std::uint64_t>(lx)) - 1.0);
}

double smoothstep(double f) { return f * f * (3.0 - 2.0 * f); }

double smooth_noise(const PatternSpec& p, std::size_t channel, long long y, long long x) {
  const auto cell = static_cast<long long>(p.cell);
  const long long lx = x / cell;
  const long long ly = y / cell;
  const double fx = smoothstep(static_cast<double>(x - lx * cell) / static_cast<double>(cell));
  const double fy = smoothstep(static_cast<double>(y - ly * cell) / static_cast<double>(cell));
  const double v00 = lattice_value(p, channel, ly, lx);
  const double v01 = lattice_value(p, channel, ly, lx + 1);
  const double v10 = lattice_value(p, channel, ly + 1, lx);
  const double v11 = lattice_value(p, channel, ly + 1, lx + 1);
  const double top = v00 + (v01 - v00) * fx;
  const double bottom = v10 + (v11 - v10) * fx;
  return top + (bottom - top) * fy;
}

}  // namespace

LatentGrid sample_pattern(const PatternSpec& pattern, int x_offset, GridShape shape) {
  if (x_offset < 0) {
    throw ConfigError("pattern offset must be non-negative");
  }
  if (pattern.kind != PatternKind::horizontal_ramp && pattern.cell < 1) {
    throw ConfigError("pattern cell size must be >= 1");
  }
  LatentGrid out(shape);
  for (std::size_t y = 0; y < shape.height; ++y) {
    for (std::size_t x = 0; x < shape.width; ++x) {
      const long long ax = static_cast<long long>(x) + x_offset;
      for (std::size_t c = 0; c < shape.channels; ++c) {
        double v = 0.0;
        switch (pattern.kind) {
          case PatternKind::horizontal_ramp:
            v = pattern.intercept + pattern.slope * static_cast<double>(ax);
            break;
          case PatternKind::checkerboard: {
            const long long parity = (ax / pattern.cell + static_cast<long long>(y) / pattern.cell) % 2;
            v = parity == 0 ? pattern.amplitude : -pattern.amplitude;
            break;
          }
          case PatternKind::smooth_noise:
            v = smooth_noise(pattern, c, static_cast<long long>(y), ax);
            break;
        }
        out.at(y, x, c) = v;
      }
    }
  }
  return out;
}

}  // namespace panofuse
