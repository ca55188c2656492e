#include "panofuse/noise.hpp"

#include <cmath>
#include <numbers>

namespace panofuse {

namespace {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) {
  return mix64(mix64(seed) ^ mix64(counter ^ 0xd1b54a32d192ed03ULL));
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(counter_hash(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

double counter_gaussian(std::uint64_t seed, std::uint64_t index) {
  const double u1 = counter_uniform(seed, 2 * index);
  const double u2 = counter_uniform(seed, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

LatentGrid gaussian_field(GridShape shape, std::uint64_t seed) {
  LatentGrid grid(shape);
  auto values = grid.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = counter_gaussian(seed, i);
  }
  return grid;
}

}  // namespace panofuse
