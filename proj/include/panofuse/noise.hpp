#pragma once

#include <cstdint>

#include "panofuse/latent_grid.hpp"

namespace panofuse {

// Counter-based generator: every value is a pure function of (seed, counter),
// so a field can be drawn in any order or partition and stay bit-identical.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter);

// Uniform in the open interval (0, 1).
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

// Standard normal sample for cell `index` (Box-Muller over two counters).
double counter_gaussian(std::uint64_t seed, std::uint64_t index);

LatentGrid gaussian_field(GridShape shape, std::uint64_t seed);

}  // namespace panofuse
