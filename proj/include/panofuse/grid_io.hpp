#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "panofuse/latent_grid.hpp"
#include "panofuse/metrics.hpp"
#include "panofuse/pipeline.hpp"

namespace panofuse {

// Raw grid: "PNF1", u32 height, u32 width, u32 channels (little-endian), then
// height*width*channels little-endian f64 values in row-major order.
std::vector<std::uint8_t> encode_raw_grid(const LatentGrid& grid);
LatentGrid decode_raw_grid(std::span<const std::uint8_t> bytes);
void write_raw_grid(const std::filesystem::path& path, const LatentGrid& grid);
LatentGrid read_raw_grid(const std::filesystem::path& path);

/// 8-bit binary pixmap after per-channel min-max mapping to [0, 255]; a channel
/// with zero range maps to 0. One channel gives P5, three or more give P6 from
/// the first three channels, two channels give P5 of channel 0.
std::vector<std::uint8_t> encode_pixmap(const LatentGrid& grid);
void write_pixmap(const std::filesystem::path& path, const LatentGrid& grid);

struct OutputFiles {
  std::filesystem::path raw;
  std::filesystem::path pixmap;
  std::filesystem::path seams_csv;
  std::filesystem::path timing_csv;
};

/// Writes <dir>/<stem>.pnf, <stem>.pgm|.ppm and, when given, the CSV reports.
OutputFiles write_outputs(const LatentGrid& grid, const OutputPaths& paths,
                          const SeamReport* seams = nullptr, const RunTiming* timing = nullptr);

}  // namespace panofuse
