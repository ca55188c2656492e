#pragma once

#include <functional>
#include <span>
#include <string_view>

#include "panofuse/latent_grid.hpp"

namespace panofuse {

/// One request across the host boundary. `reply` has the same shape as the
/// request; a host that produced something else reports it via reply_shape.
struct ExternalCallFrame {
  std::span<const double> latent;
  GridShape shape;
  int timestep = 0;
  int x_offset = 0;
  std::string_view condition;
  std::span<double> reply;
  GridShape reply_shape;
};

using ExternalDenoiserFn = std::function<void(ExternalCallFrame&)>;

/// Owns the registration; destroying it unregisters the callback.
class ExternalDenoiserHandle {
 public:
  ExternalDenoiserHandle() = default;
  ~ExternalDenoiserHandle();
  ExternalDenoiserHandle(ExternalDenoiserHandle&& other) noexcept;
  ExternalDenoiserHandle& operator=(ExternalDenoiserHandle&& other) noexcept;
  ExternalDenoiserHandle(const ExternalDenoiserHandle&) = delete;
  ExternalDenoiserHandle& operator=(const ExternalDenoiserHandle&) = delete;

  [[nodiscard]] bool active() const { return active_; }
  void release();

 private:
  friend ExternalDenoiserHandle register_external_denoiser(ExternalDenoiserFn);
  explicit ExternalDenoiserHandle(bool active) : active_(active) {}
  bool active_ = false;
};

/// Throws ConfigError when a callback is already registered.
ExternalDenoiserHandle register_external_denoiser(ExternalDenoiserFn callback);

bool external_denoiser_registered();

/// Serialized dispatch: at most one callback invocation is in flight at a time.
LatentGrid call_external_denoiser(const LatentGrid& z_t, int t, int x_offset,
                                  std::string_view condition);

}  // namespace panofuse
