#pragma once

#include <stdexcept>
#include <string>

namespace nfloc {

enum class ErrorCode {
  InvalidParameter,
  InvalidArgument,
  SingularGeometry,
  UnboundedPose,
  RankDeficient,
  DegenerateRhs,
  DimensionMismatch,
  NumericalFailure,
  Config,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Agent position coincides with an anchor.
class SingularGeometryError : public Error {
 public:
  SingularGeometryError(std::size_t anchor_index, const std::string& what)
      : Error(ErrorCode::SingularGeometry, what), anchor_index_(anchor_index) {}

  std::size_t anchor_index() const noexcept { return anchor_index_; }

 private:
  std::size_t anchor_index_;
};

// Fisher information too ill-conditioned to invert.
class UnboundedPoseError : public Error {
 public:
  UnboundedPoseError(double condition, const std::string& what)
      : Error(ErrorCode::UnboundedPose, what), condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace nfloc
