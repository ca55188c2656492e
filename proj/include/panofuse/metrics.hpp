#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "panofuse/latent_grid.hpp"
#include "panofuse/tiler.hpp"

namespace panofuse {

/// Horizontal first-difference statistics split at crop edges. Difference
/// column c measures |z[:, c] - z[:, c-1]|, averaged over rows and channels.
struct SeamReport {
  std::vector<int> boundary_columns;  // interior crop edges
  double boundary_discontinuity = 0.0;
  double background_discontinuity = 0.0;
  double seam_ratio = 1.0;
};

SeamReport seam_report(const LatentGrid& panorama, const TilePlan& plan);

/// Matching term for one neighbor pair, summed over the left-overlap band of
/// `window` against the same panorama columns of `neighbor`.
double pair_overlap_residual(const LatentGrid& neighbor, const CropWindow& neighbor_window,
                             const LatentGrid& self, const CropWindow& window);

/// Sum of pair_overlap_residual over consecutive crops of the plan.
double overlap_residual(std::span<const LatentGrid> crops, const TilePlan& plan);

struct RunTiming {
  std::vector<int> timesteps;         // in execution order, T..1
  std::vector<double> step_seconds;
  std::vector<int> crops_per_step;
  std::vector<int> calls_per_step;  // differs from crops only for fixed-reference runs
  long long denoiser_calls = 0;
  double total_seconds = 0.0;
};

/// Runs `run` the given number of times and returns the run with the median
/// total (lower median for even counts).
RunTiming time_run(const std::function<RunTiming()>& run, int repetitions);

// CSV writers; the header line is part of the format.
//   seams:  boundary_columns,boundary_discontinuity,background_discontinuity,seam_ratio
//   timing: timestep,crops,calls,seconds
void write_seam_csv(std::ostream& out, const SeamReport& report);
void write_timing_csv(std::ostream& out, const RunTiming& timing);

}  // namespace panofuse
