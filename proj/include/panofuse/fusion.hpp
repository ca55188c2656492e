#pragma once

#include <span>
#include <vector>

#include "panofuse/latent_grid.hpp"
#include "panofuse/tiler.hpp"

namespace panofuse {

enum class FusionVariant { baseline, twin, twin_fixed_reference };

// Which version of crop i-1 crop i is matched against during the sweep.
enum class NeighborSource { optimized, raw };

struct FusionConfig {
  FusionVariant variant = FusionVariant::twin;
  double lambda = 1.0;
  int tau = 25;  // crop fusion runs while t > tau
  Weighting weighting = Weighting::uniform;
  NeighborSource neighbor = NeighborSource::optimized;

  void validate(int steps) const;
};

bool fusion_active(const FusionConfig& cfg, int t);

/// Closed-form minimizer of
///   |M_r(i-1) . neighbor - M_l(i) . z|^2 + lambda |anchor - z|^2
/// over z: on the left-overlap band z = (neighbor + lambda*anchor) / (1 + lambda)
/// with neighbor values taken at the same panorama columns; anchor elsewhere.
LatentGrid fuse_crop_pair(const LatentGrid& neighbor, const CropWindow& neighbor_window,
                          const LatentGrid& anchor, const CropWindow& window, double lambda);

/// Weighted average of crops pasted at their offsets. Accumulates in
/// ascending crop order so the result is independent of how crops were produced.
LatentGrid fuse_weighted_average(std::span<const CropWindow> windows,
                                 std::span<const LatentGrid> crops, GridShape pano_shape);

/// Left-to-right crop fusion over one timestep. Identity for the baseline
/// variant or once t <= tau. For twin_fixed_reference, fixed_refs[i] replaces
/// the crop's own prediction as the regularization anchor.
std::vector<LatentGrid> twin_fusion_sweep(std::vector<LatentGrid> denoised, const TilePlan& plan,
                                          const FusionConfig& cfg, int t,
                                          std::span<const LatentGrid> fixed_refs = {});

}  // namespace panofuse
