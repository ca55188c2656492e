#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "panofuse/pipeline.hpp"

namespace panofuse {

/// JSON mirrors RunConfig field for field; unknown keys are rejected and
/// missing keys keep their defaults (fusion.tau defaults to steps / 2).
RunConfig run_config_from_json(const nlohmann::json& doc);
nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

std::string to_string(FusionVariant variant);
FusionVariant parse_variant(std::string_view name);

}  // namespace panofuse
