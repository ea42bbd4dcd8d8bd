#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "core/error.hpp"

namespace nfloc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using MeasurementVector = Eigen::VectorXd;

// Direction with ||v|| = 1 (to 1e-9).
class UnitVec3 {
 public:
  static constexpr double kNormTolerance = 1e-9;

  UnitVec3() : v_(0.0, 0.0, 1.0) {}

  // Throws InvalidArgument if v is not unit-norm within kNormTolerance.
  explicit UnitVec3(const Vec3& v);

  // Normalizes v; throws InvalidArgument for a zero or non-finite vector.
  static UnitVec3 normalized(const Vec3& v);

  const Vec3& vec() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  UnitVec3 operator-() const { return UnitVec3(-v_, Unchecked{}); }

 private:
  struct Unchecked {};
  UnitVec3(const Vec3& v, Unchecked) : v_(v) {}

  Vec3 v_;
};

// phi in [0, 2pi), theta in [0, pi] for canonical values. Estimators iterate
// on unconstrained angles and canonicalize on output.
struct SphericalOrientation {
  double phi = 0.0;
  double theta = 0.0;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  SphericalOrientation orientation;
};

struct Anchor {
  Vec3 position = Vec3::Zero();
  UnitVec3 orientation;
  std::size_t index = 0;
};

// Known anchor infrastructure: N >= 1 anchors with pairwise distinct positions.
class AnchorTopology {
 public:
  AnchorTopology() = default;

  // Validates the invariants and re-indexes anchors 0..N-1 in order.
  explicit AnchorTopology(std::vector<Anchor> anchors);

  std::size_t size() const { return anchors_.size(); }
  const Anchor& operator[](std::size_t i) const { return anchors_[i]; }
  const std::vector<Anchor>& anchors() const { return anchors_; }
  auto begin() const { return anchors_.begin(); }
  auto end() const { return anchors_.end(); }

 private:
  std::vector<Anchor> anchors_;
};

}  // namespace nfloc
