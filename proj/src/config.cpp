#include "panofuse/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "panofuse/errors.hpp"

namespace panofuse {

using nlohmann::json;

namespace {

template <typename Enum, std::size_t N>
using NameTable = std::array<std::pair<Enum, std::string_view>, N>;

constexpr NameTable<FusionVariant, 3> kVariants{{{FusionVariant::baseline, "baseline"},
                                                 {FusionVariant::twin, "twin"},
                                                 {FusionVariant::twin_fixed_reference,
                                                  "twin_fixed_reference"}}};
constexpr NameTable<Weighting, 2> kWeightings{
    {{Weighting::uniform, "uniform"}, {Weighting::gaussian, "gaussian"}}};
constexpr NameTable<NeighborSource, 2> kNeighbors{
    {{NeighborSource::optimized, "optimized"}, {NeighborSource::raw, "raw"}}};
constexpr NameTable<DenoiserKind, 4> kDenoisers{{{DenoiserKind::exact_noise, "exact_noise"},
                                                 {DenoiserKind::crop_anchored, "crop_anchored"},
                                                 {DenoiserKind::constant, "constant"},
                                                 {DenoiserKind::external, "external"}}};
constexpr NameTable<PatternKind, 3> kPatterns{
    {{PatternKind::horizontal_ramp, "horizontal_ramp"},
     {PatternKind::checkerboard, "checkerboard"},
     {PatternKind::smooth_noise, "smooth_noise"}}};
constexpr NameTable<RunMode, 2> kModes{
    {{RunMode::panorama, "panorama"}, {RunMode::twin_pair, "twin_pair"}}};

template <typename Enum, std::size_t N>
std::string_view name_of(const NameTable<Enum, N>& table, Enum value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  throw ConfigError("unnamed enum value");
}

template <typename Enum, std::size_t N>
Enum value_of(const NameTable<Enum, N>& table, std::string_view name, std::string_view field) {
  for (const auto& [v, n] : table) {
    if (n == name) return v;
  }
  throw ConfigError("unknown value '" + std::string(name) + "' for " + std::string(field));
}

void require_object(const json& node, std::string_view where) {
  if (!node.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
}

void reject_unknown_keys(const json& node, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  for (const auto& item : node.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError("unknown key '" + item.key() + "' in " + std::string(where));
    }
  }
}

template <typename T>
void read(const json& node, std::string_view key, T& out, std::string_view where) {
  const auto it = node.find(key);
  if (it == node.end()) return;
  try {
    it->get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + "." + std::string(key) + ": " + e.what());
  }
}

template <typename Enum, std::size_t N>
void read_enum(const json& node, std::string_view key, Enum& out,
               const NameTable<Enum, N>& table, std::string_view where) {
  std::string name;
  if (!node.contains(key)) return;
  read(node, key, name, where);
  out = value_of(table, name, std::string(where) + "." + std::string(key));
}

}  // namespace

std::string to_string(FusionVariant variant) { return std::string(name_of(kVariants, variant)); }

FusionVariant parse_variant(std::string_view name) { return value_of(kVariants, name, "variant"); }

RunConfig run_config_from_json(const json& doc) {
  require_object(doc, "config");
  reject_unknown_keys(doc,
                      {"pano_height", "pano_width", "crop_height", "crop_width", "channels",
                       "schedule", "view_stride", "cross_stride", "interleave", "fusion",
                       "denoiser", "seed", "output", "mode", "parallel_workers"},
                      "config");
  RunConfig cfg;
  read(doc, "pano_height", cfg.pano_h, "config");
  read(doc, "pano_width", cfg.pano_w, "config");
  read(doc, "crop_height", cfg.crop_h, "config");
  read(doc, "crop_width", cfg.crop_w, "config");
  read(doc, "channels", cfg.channels, "config");
  read(doc, "view_stride", cfg.view_stride, "config");
  read(doc, "cross_stride", cfg.cross_stride, "config");
  read(doc, "interleave", cfg.interleave, "config");
  read(doc, "seed", cfg.seed, "config");
  read(doc, "parallel_workers", cfg.parallel_workers, "config");
  read_enum(doc, "mode", cfg.mode, kModes, "config");

  if (doc.contains("schedule")) {
    const json& s = doc["schedule"];
    require_object(s, "schedule");
    reject_unknown_keys(s, {"steps", "beta_start", "beta_end"}, "schedule");
    read(s, "steps", cfg.schedule.steps, "schedule");
    read(s, "beta_start", cfg.schedule.beta_start, "schedule");
    read(s, "beta_end", cfg.schedule.beta_end, "schedule");
  }
  cfg.fusion.tau = cfg.schedule.steps / 2;
  if (doc.contains("fusion")) {
    const json& f = doc["fusion"];
    require_object(f, "fusion");
    reject_unknown_keys(f, {"variant", "lambda", "tau", "weighting", "neighbor"}, "fusion");
    read_enum(f, "variant", cfg.fusion.variant, kVariants, "fusion");
    read(f, "lambda", cfg.fusion.lambda, "fusion");
    read(f, "tau", cfg.fusion.tau, "fusion");
    read_enum(f, "weighting", cfg.fusion.weighting, kWeightings, "fusion");
    read_enum(f, "neighbor", cfg.fusion.neighbor, kNeighbors, "fusion");
  }
  if (doc.contains("denoiser")) {
    const json& d = doc["denoiser"];
    require_object(d, "denoiser");
    reject_unknown_keys(d,
                        {"kind", "target", "condition", "simulated_cost_us", "constant_value",
                         "anchor_strength"},
                        "denoiser");
    read_enum(d, "kind", cfg.denoiser.kind, kDenoisers, "denoiser");
    read(d, "condition", cfg.denoiser.condition, "denoiser");
    read(d, "constant_value", cfg.denoiser.constant_value, "denoiser");
    read(d, "anchor_strength", cfg.denoiser.anchor_strength, "denoiser");
    long long cost_us = cfg.denoiser.simulated_cost.count();
    read(d, "simulated_cost_us", cost_us, "denoiser");
    cfg.denoiser.simulated_cost = std::chrono::microseconds(cost_us);
    if (d.contains("target")) {
      const json& p = d["target"];
      require_object(p, "denoiser.target");
      reject_unknown_keys(p, {"kind", "slope", "intercept", "cell", "seed", "amplitude"},
                          "denoiser.target");
      read_enum(p, "kind", cfg.denoiser.target.kind, kPatterns, "denoiser.target");
      read(p, "slope", cfg.denoiser.target.slope, "denoiser.target");
      read(p, "intercept", cfg.denoiser.target.intercept, "denoiser.target");
      read(p, "cell", cfg.denoiser.target.cell, "denoiser.target");
      read(p, "seed", cfg.denoiser.target.seed, "denoiser.target");
      read(p, "amplitude", cfg.denoiser.target.amplitude, "denoiser.target");
    }
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    require_object(o, "output");
    reject_unknown_keys(o, {"dir", "stem"}, "output");
    read(o, "dir", cfg.output.dir, "output");
    read(o, "stem", cfg.output.stem, "output");
  }
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  const auto& p = cfg.denoiser.target;
  return json{
      {"pano_height", cfg.pano_h},
      {"pano_width", cfg.pano_w},
      {"crop_height", cfg.crop_h},
      {"crop_width", cfg.crop_w},
      {"channels", cfg.channels},
      {"schedule",
       {{"steps", cfg.schedule.steps},
        {"beta_start", cfg.schedule.beta_start},
        {"beta_end", cfg.schedule.beta_end}}},
      {"view_stride", cfg.view_stride},
      {"cross_stride", cfg.cross_stride},
      {"interleave", cfg.interleave},
      {"fusion",
       {{"variant", name_of(kVariants, cfg.fusion.variant)},
        {"lambda", cfg.fusion.lambda},
        {"tau", cfg.fusion.tau},
        {"weighting", name_of(kWeightings, cfg.fusion.weighting)},
        {"neighbor", name_of(kNeighbors, cfg.fusion.neighbor)}}},
      {"denoiser",
       {{"kind", name_of(kDenoisers, cfg.denoiser.kind)},
        {"target",
         {{"kind", name_of(kPatterns, p.kind)},
          {"slope", p.slope},
          {"intercept", p.intercept},
          {"cell", p.cell},
          {"seed", p.seed},
          {"amplitude", p.amplitude}}},
        {"condition", cfg.denoiser.condition},
        {"simulated_cost_us", cfg.denoiser.simulated_cost.count()},
        {"constant_value", cfg.denoiser.constant_value},
        {"anchor_strength", cfg.denoiser.anchor_strength}}},
      {"seed", cfg.seed},
      {"output", {{"dir", cfg.output.dir}, {"stem", cfg.output.stem}}},
      {"mode", name_of(kModes, cfg.mode)},
      {"parallel_workers", cfg.parallel_workers},
  };
}

RunConfig parse_run_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return run_config_from_json(doc);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_run_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace panofuse
