#include "panofuse/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "panofuse/errors.hpp"

namespace panofuse {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'P', 'N', 'F', '1'};
constexpr std::size_t kHeaderSize = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t pos, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(bytes[pos + static_cast<std::size_t>(i)]) << (8 * i);
  }
  return v;
}

std::uint32_t checked_u32(std::size_t v, std::string_view what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError(std::string(what) + " does not fit the raw grid header");
  }
  return static_cast<std::uint32_t>(v);
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

template <typename Writer>
void write_text(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  writer(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode_raw_grid(const LatentGrid& grid) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + grid.size() * 8);
  for (std::uint8_t b : kMagic) out.push_back(b);
  put_u32(out, checked_u32(grid.height(), "height"));
  put_u32(out, checked_u32(grid.width(), "width"));
  put_u32(out, checked_u32(grid.channels(), "channels"));
  for (double v : grid.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

LatentGrid decode_raw_grid(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw ConfigError("not a raw grid: missing PNF1 header");
  }
  const GridShape shape{get_le(bytes, 4, 4), get_le(bytes, 8, 4), get_le(bytes, 12, 4)};
  if (bytes.size() != kHeaderSize + shape.size() * 8) {
    throw ConfigError("raw grid payload size does not match header shape " + to_string(shape));
  }
  std::vector<double> values(shape.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<double>(get_le(bytes, kHeaderSize + 8 * i, 8));
  }
  return LatentGrid(shape, std::move(values));
}

void write_raw_grid(const std::filesystem::path& path, const LatentGrid& grid) {
  write_bytes(path, encode_raw_grid(grid));
}

LatentGrid read_raw_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_raw_grid(bytes);
  } catch (const ConfigError& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_pixmap(const LatentGrid& grid) {
  const std::size_t out_channels = grid.channels() >= 3 ? 3 : 1;
  std::vector<double> lo(out_channels, std::numeric_limits<double>::infinity());
  std::vector<double> hi(out_channels, -std::numeric_limits<double>::infinity());
  for (std::size_t y = 0; y < grid.height(); ++y) {
    for (std::size_t x = 0; x < grid.width(); ++x) {
      for (std::size_t c = 0; c < out_channels; ++c) {
        lo[c] = std::min(lo[c], grid.at(y, x, c));
        hi[c] = std::max(hi[c], grid.at(y, x, c));
      }
    }
  }
  const std::string header = std::string(out_channels == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(grid.width()) + " " + std::to_string(grid.height()) +
                             "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + grid.height() * grid.width() * out_channels);
  for (std::size_t y = 0; y < grid.height(); ++y) {
    for (std::size_t x = 0; x < grid.width(); ++x) {
      for (std::size_t c = 0; c < out_channels; ++c) {
        const double range = hi[c] - lo[c];
        const double level = range > 0.0 ? 255.0 * (grid.at(y, x, c) - lo[c]) / range : 0.0;
        out.push_back(static_cast<std::uint8_t>(std::clamp(std::lround(level), 0L, 255L)));
      }
    }
  }
  return out;
}

void write_pixmap(const std::filesystem::path& path, const LatentGrid& grid) {
  write_bytes(path, encode_pixmap(grid));
}

OutputFiles write_outputs(const LatentGrid& grid, const OutputPaths& paths,
                          const SeamReport* seams, const RunTiming* timing) {
  const std::filesystem::path dir(paths.dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

  OutputFiles files;
  files.raw = dir / (paths.stem + ".pnf");
  files.pixmap = dir / (paths.stem + (grid.channels() >= 3 ? ".ppm" : ".pgm"));
  write_raw_grid(files.raw, grid);
  write_pixmap(files.pixmap, grid);
  if (seams) {
    files.seams_csv = dir / (paths.stem + "_seams.csv");
    write_text(files.seams_csv, [&](std::ostream& os) { write_seam_csv(os, *seams); });
  }
  if (timing) {
    files.timing_csv = dir / (paths.stem + "_timing.csv");
    write_text(files.timing_csv, [&](std::ostream& os) { write_timing_csv(os, *timing); });
  }
  return files;
}

}  // namespace panofuse
