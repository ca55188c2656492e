#pragma once

#include <stdexcept>
#include <string>

namespace panofuse {

/// Invalid run configuration or violated operation precondition.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A denoiser call failed. Carries the 1-based crop index and the timestep so
/// callers can report where in the sampling loop the failure happened.
class DenoiserError : public std::runtime_error {
 public:
  enum class Kind { failure, reply_shape };

  DenoiserError(int crop_index, int timestep, const std::string& detail,
                Kind kind = Kind::failure);

  [[nodiscard]] int crop_index() const { return crop_index_; }
  [[nodiscard]] int timestep() const { return timestep_; }
  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const std::string& detail() const { return detail_; }

 private:
  int crop_index_;
  int timestep_;
  Kind kind_;
  std::string detail_;
};

/// Raised inside a denoiser when an external reply has the wrong shape; the
/// pipeline rewraps it as DenoiserError{Kind::reply_shape}.
class ReplyShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace panofuse
