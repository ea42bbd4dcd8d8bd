#include "core/types.hpp"

#include <cmath>
#include <string>

namespace nfloc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::SingularGeometry: return "singular-geometry";
    case ErrorCode::UnboundedPose: return "unbounded-pose";
    case ErrorCode::RankDeficient: return "rank-deficiency";
    case ErrorCode::DegenerateRhs: return "degenerate-rhs";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

UnitVec3::UnitVec3(const Vec3& v) : v_(v) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > kNormTolerance) {
    throw Error(ErrorCode::InvalidArgument, "vector is not unit-norm");
  }
}

UnitVec3 UnitVec3::normalized(const Vec3& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || n == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero or non-finite vector");
  }
  return UnitVec3(v / n, Unchecked{});
}

AnchorTopology::AnchorTopology(std::vector<Anchor> anchors) : anchors_(std::move(anchors)) {
  if (anchors_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "topology needs at least one anchor");
  }
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    anchors_[i].index = i;
    if (!anchors_[i].position.allFinite()) {
      throw Error(ErrorCode::InvalidArgument,
                  "anchor " + std::to_string(i) + " has a non-finite position");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (anchors_[i].position == anchors_[j].position) {
        throw Error(ErrorCode::InvalidArgument,
                    "anchors " + std::to_string(j) + " and " + std::to_string(i) +
                        " share a position");
      }
    }
  }
}

}  // namespace nfloc
