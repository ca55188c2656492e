#include "panofuse/external.hpp"

#include <mutex>
#include <utility>

#include "panofuse/errors.hpp"

namespace panofuse {

namespace {

struct Registry {
  std::mutex state_mutex;  // guards callback
  std::mutex call_mutex;   // serializes invocations
  ExternalDenoiserFn callback;
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

ExternalDenoiserHandle::~ExternalDenoiserHandle() { release(); }

ExternalDenoiserHandle::ExternalDenoiserHandle(ExternalDenoiserHandle&& other) noexcept
    : active_(std::exchange(other.active_, false)) {}

ExternalDenoiserHandle& ExternalDenoiserHandle::operator=(ExternalDenoiserHandle&& other) noexcept {
  if (this != &other) {
    release();
    active_ = std::exchange(other.active_, false);
  }
  return *this;
}

void ExternalDenoiserHandle::release() {
  if (!active_) return;
  active_ = false;
  auto& r = registry();
  std::scoped_lock lock(r.call_mutex, r.state_mutex);
  r.callback = nullptr;
}

ExternalDenoiserHandle register_external_denoiser(ExternalDenoiserFn callback) {
  if (!callback) {
    throw ConfigError("external denoiser callback is empty");
  }
  auto& r = registry();
  std::scoped_lock lock(r.state_mutex);
  if (r.callback) {
    throw ConfigError("an external denoiser is already registered");
  }
  r.callback = std::move(callback);
  return ExternalDenoiserHandle(true);
}

bool external_denoiser_registered() {
  auto& r = registry();
  std::scoped_lock lock(r.state_mutex);
  return static_cast<bool>(r.callback);
}

LatentGrid call_external_denoiser(const LatentGrid& z_t, int t, int x_offset,
                                  std::string_view condition) {
  auto& r = registry();
  std::scoped_lock call_lock(r.call_mutex);
  ExternalDenoiserFn fn;
  {
    std::scoped_lock lock(r.state_mutex);
    fn = r.callback;
  }
  if (!fn) {
    throw ConfigError("no external denoiser registered");
  }
  LatentGrid reply(z_t.shape());
  ExternalCallFrame frame{z_t.values(), z_t.shape(), t, x_offset, condition, reply.values(),
                          z_t.shape()};
  fn(frame);
  if (frame.reply_shape != z_t.shape()) {
    throw ReplyShapeError("external reply shape " + to_string(frame.reply_shape) +
                          " does not match request " + to_string(z_t.shape()));
  }
  if (!reply.all_finite()) {
    throw std::runtime_error("external reply contains non-finite values");
  }
  return reply;
}

}  // namespace panofuse
