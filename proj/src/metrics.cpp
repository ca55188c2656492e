#include "panofuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "panofuse/errors.hpp"

namespace panofuse {

namespace {

// Floor for the background term so a perfectly flat background with seams
// still yields a finite ratio.
constexpr double kBackgroundFloor = 1e-12;

}  // namespace

SeamReport seam_report(const LatentGrid& panorama, const TilePlan& plan) {
  const std::size_t width = panorama.width();
  if (width < 2) {
    throw ConfigError("seam_report needs a panorama at least 2 columns wide");
  }
  const std::size_t rows = panorama.height();
  const std::size_t channels = panorama.channels();

  std::vector<double> diff(width, 0.0);  // diff[0] unused
  for (std::size_t x = 1; x < width; ++x) {
    double acc = 0.0;
    for (std::size_t y = 0; y < rows; ++y) {
      for (std::size_t c = 0; c < channels; ++c) {
        acc += std::abs(panorama.at(y, x, c) - panorama.at(y, x - 1, c));
      }
    }
    diff[x] = acc / static_cast<double>(rows * channels);
  }

  std::set<int> edges;
  for (const auto& w : plan.windows) {
    for (int e : {w.x_offset, w.x_offset + w.crop_w}) {
      if (e > 0 && e < static_cast<int>(width)) edges.insert(e);
    }
  }

  std::vector<bool> is_boundary(width, false);
  for (int e : edges) {
    for (int x = e - 1; x <= e + 1; ++x) {
      if (x >= 1 && x < static_cast<int>(width)) is_boundary[static_cast<std::size_t>(x)] = true;
    }
  }

  SeamReport report;
  report.boundary_columns.assign(edges.begin(), edges.end());
  double boundary_sum = 0.0;
  double background_sum = 0.0;
  std::size_t boundary_n = 0;
  std::size_t background_n = 0;
  for (std::size_t x = 1; x < width; ++x) {
    if (is_boundary[x]) {
      boundary_sum += diff[x];
      ++boundary_n;
    } else {
      background_sum += diff[x];
      ++background_n;
    }
  }
  report.boundary_discontinuity = boundary_n ? boundary_sum / static_cast<double>(boundary_n) : 0.0;
  report.background_discontinuity =
      background_n ? background_sum / static_cast<double>(background_n) : 0.0;

  if (boundary_n == 0) {
    report.seam_ratio = 1.0;
  } else if (report.background_discontinuity > 0.0) {
    report.seam_ratio = report.boundary_discontinuity / report.background_discontinuity;
  } else if (report.boundary_discontinuity == 0.0) {
    report.seam_ratio = 1.0;
  } else {
    report.seam_ratio = report.boundary_discontinuity / kBackgroundFloor;
  }
  return report;
}

double pair_overlap_residual(const LatentGrid& neighbor, const CropWindow& neighbor_window,
                             const LatentGrid& self, const CropWindow& window) {
  if (!window.has_left_neighbor()) return 0.0;
  const int shift = window.x_offset - neighbor_window.x_offset;
  if (neighbor.height() != self.height() || neighbor.channels() != self.channels() ||
      self.width() != static_cast<std::size_t>(window.crop_w) ||
      neighbor.width() != static_cast<std::size_t>(neighbor_window.crop_w) || shift <= 0 ||
      window.left_overlap.end + shift > neighbor_window.crop_w) {
    throw ConfigError("overlap residual: crops are not aligned with windows " +
                      std::to_string(neighbor_window.index) + " and " +
                      std::to_string(window.index));
  }
  double sum = 0.0;
  for (std::size_t y = 0; y < self.height(); ++y) {
    for (int x = window.left_overlap.begin; x < window.left_overlap.end; ++x) {
      for (std::size_t c = 0; c < self.channels(); ++c) {
        const double d = neighbor.at(y, static_cast<std::size_t>(x + shift), c) -
                         self.at(y, static_cast<std::size_t>(x), c);
        sum += d * d;
      }
    }
  }
  return sum;
}

double overlap_residual(std::span<const LatentGrid> crops, const TilePlan& plan) {
  if (crops.size() != plan.windows.size()) {
    throw ConfigError("overlap residual: " + std::to_string(crops.size()) + " crops for " +
                      std::to_string(plan.windows.size()) + " windows");
  }
  double total = 0.0;
  for (std::size_t i = 1; i < crops.size(); ++i) {
    total += pair_overlap_residual(crops[i - 1], plan.windows[i - 1], crops[i], plan.windows[i]);
  }
  return total;
}

RunTiming time_run(const std::function<RunTiming()>& run, int repetitions) {
  if (repetitions < 1) {
    throw ConfigError("time_run needs at least one repetition");
  }
  std::vector<RunTiming> runs;
  runs.reserve(static_cast<std::size_t>(repetitions));
  for (int i = 0; i < repetitions; ++i) runs.push_back(run());
  std::sort(runs.begin(), runs.end(), [](const RunTiming& a, const RunTiming& b) {
    return a.total_seconds < b.total_seconds;
  });
  return runs[static_cast<std::size_t>(repetitions - 1) / 2];
}

void write_seam_csv(std::ostream& out, const SeamReport& report) {
  out << "boundary_columns,boundary_discontinuity,background_discontinuity,seam_ratio\n";
  for (std::size_t i = 0; i < report.boundary_columns.size(); ++i) {
    if (i) out << ' ';
    out << report.boundary_columns[i];
  }
  out.precision(17);
  out << ',' << report.boundary_discontinuity << ',' << report.background_discontinuity << ','
      << report.seam_ratio << '\n';
}

void write_timing_csv(std::ostream& out, const RunTiming& timing) {
  out << "timestep,crops,calls,seconds\n";
  out.precision(9);
  for (std::size_t i = 0; i < timing.timesteps.size(); ++i) {
    out << timing.timesteps[i] << ',' << timing.crops_per_step[i] << ','
        << timing.calls_per_step[i] << ',' << timing.step_seconds[i] << '\n';
  }
}

}  // namespace panofuse
