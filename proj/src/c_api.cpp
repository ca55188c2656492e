#include "panofuse/c_api.h"

#include <cstdlib>
#include <cstring>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

#include "panofuse/config.hpp"
#include "panofuse/errors.hpp"
#include "panofuse/external.hpp"
#include "panofuse/grid_io.hpp"
#include "panofuse/pipeline.hpp"

namespace {

using namespace panofuse;

std::mutex g_handle_mutex;
std::optional<ExternalDenoiserHandle> g_handle;

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

class HostCallbackError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void fail(pnf_run_result* result, pnf_status status, const std::string& message, int crop = 0,
          int timestep = -1) {
  result->status = status;
  result->error_message = copy_string(message);
  result->error_crop = crop;
  result->error_timestep = timestep;
}

}  // namespace

extern "C" {

pnf_status pnf_register_external(pnf_denoise_fn fn, void* user_data) {
  if (!fn) return PNF_CONFIG_ERROR;
  std::scoped_lock lock(g_handle_mutex);
  try {
    g_handle = register_external_denoiser([fn, user_data](ExternalCallFrame& frame) {
      const std::string condition(frame.condition);
      pnf_call_frame c{frame.latent.data(),
                       static_cast<uint32_t>(frame.shape.height),
                       static_cast<uint32_t>(frame.shape.width),
                       static_cast<uint32_t>(frame.shape.channels),
                       frame.timestep,
                       frame.x_offset,
                       condition.c_str(),
                       frame.reply.data(),
                       static_cast<uint32_t>(frame.reply_shape.height),
                       static_cast<uint32_t>(frame.reply_shape.width),
                       static_cast<uint32_t>(frame.reply_shape.channels)};
      char message[512] = {0};
      const int rc = fn(&c, user_data, message, sizeof(message) - 1);
      if (rc != 0) {
        throw HostCallbackError(message[0] ? std::string(message)
                                           : "host callback returned " + std::to_string(rc));
      }
      frame.reply_shape = GridShape{c.reply_height, c.reply_width, c.reply_channels};
    });
  } catch (const ConfigError&) {
    return PNF_ALREADY_REGISTERED;
  }
  return PNF_OK;
}

pnf_status pnf_unregister_external(void) {
  std::scoped_lock lock(g_handle_mutex);
  if (!g_handle || !g_handle->active()) return PNF_NOT_REGISTERED;
  g_handle.reset();
  return PNF_OK;
}

pnf_status pnf_run_config(const char* config_json, pnf_run_result* result) {
  if (!result) return PNF_CONFIG_ERROR;
  *result = pnf_run_result{PNF_OK, nullptr, 0, nullptr, nullptr, nullptr, 0, -1};
  if (!config_json) {
    fail(result, PNF_CONFIG_ERROR, "config document is null");
    return result->status;
  }
  try {
    const RunConfig cfg = parse_run_config(config_json);
    const PanoramaResult run = generate_panorama(cfg);
    const auto bytes = encode_raw_grid(run.panorama);
    result->raw_grid = static_cast<uint8_t*>(std::malloc(bytes.size()));
    if (!result->raw_grid) throw std::bad_alloc();
    std::memcpy(result->raw_grid, bytes.data(), bytes.size());
    result->raw_grid_size = bytes.size();
    std::ostringstream seams;
    write_seam_csv(seams, run.seams);
    std::ostringstream timing;
    write_timing_csv(timing, run.timing);
    result->seams_csv = copy_string(seams.str());
    result->timing_csv = copy_string(timing.str());
  } catch (const DenoiserError& e) {
    fail(result,
         e.kind() == DenoiserError::Kind::reply_shape ? PNF_SHAPE_MISMATCH : PNF_DENOISER_ERROR,
         e.what(), e.crop_index(), e.timestep());
  } catch (const ConfigError& e) {
    fail(result, PNF_CONFIG_ERROR, e.what());
  } catch (const std::exception& e) {
    fail(result, PNF_INTERNAL_ERROR, e.what());
  }
  return result->status;
}

void pnf_free_result(pnf_run_result* result) {
  if (!result) return;
  std::free(result->raw_grid);
  std::free(result->seams_csv);
  std::free(result->timing_csv);
  std::free(result->error_message);
  *result = pnf_run_result{PNF_OK, nullptr, 0, nullptr, nullptr, nullptr, 0, -1};
}

}  // extern "C"
