#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace mvlm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Bad or unreadable input (files, flags, malformed records).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stage of the placement pipeline could not produce a result.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace mvlm
