#include "core/topology.hpp"

#include <array>
#include <cmath>

namespace nfloc {

void validate(const Room& room) {
  for (double v : {room.side_x, room.side_y, room.height}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::Config, "room dimensions must be positive");
    }
  }
  if (room.side_x <= 2 * kDeploymentMargin || room.side_y <= 2 * kDeploymentMargin ||
      room.height <= 2 * kDeploymentMargin) {
    throw Error(ErrorCode::Config, "room too small for the deployment margin");
  }
}

AnchorTopology generate_topology(std::size_t anchor_count, const Room& room) {
  if (anchor_count < 1) throw Error(ErrorCode::InvalidArgument, "need at least one anchor");
  validate(room);

  std::array<std::size_t, 4> per_wall{};
  for (std::size_t k = 0; k < anchor_count; ++k) ++per_wall[k % 4];

  constexpr std::array<double, 3> kHeightFractions{1.0 / 6.0, 0.5, 5.0 / 6.0};
  std::array<std::size_t, 4> slot{};
  std::vector<Anchor> anchors;
  anchors.reserve(anchor_count);
  for (std::size_t k = 0; k < anchor_count; ++k) {
    const std::size_t wall = k % 4;
    const double frac =
        (static_cast<double>(slot[wall]++) + 0.5) / static_cast<double>(per_wall[wall]);
    const double z = kHeightFractions[k % 3] * room.height;
    Anchor a;
    switch (wall) {
      case 0:
        a.position = Vec3(frac * room.side_x, 0.0, z);
        a.orientation = UnitVec3(Vec3(0, 1, 0));
        break;
      case 1:
        a.position = Vec3(room.side_x, frac * room.side_y, z);
        a.orientation = UnitVec3(Vec3(-1, 0, 0));
        break;
      case 2:
        a.position = Vec3((1.0 - frac) * room.side_x, room.side_y, z);
        a.orientation = UnitVec3(Vec3(0, -1, 0));
        break;
      default:
        a.position = Vec3(0.0, (1.0 - frac) * room.side_y, z);
        a.orientation = UnitVec3(Vec3(1, 0, 0));
        break;
    }
    anchors.push_back(a);
  }
  return AnchorTopology(std::move(anchors));
}

Pose sample_deployment(Rng& rng, const Room& room) {
  Pose pose;
  pose.position = Vec3(uniform(rng, kDeploymentMargin, room.side_x - kDeploymentMargin),
                       uniform(rng, kDeploymentMargin, room.side_y - kDeploymentMargin),
                       uniform(rng, kDeploymentMargin, room.height - kDeploymentMargin));
  pose.orientation = spherical_from_orientation(uniform_on_sphere(rng));
  return pose;
}

MeasurementVector simulate_measurement(Rng& rng, const Pose& pose, const AnchorTopology& topology,
                                       double rho, double sigma2) {
  MeasurementVector y = forward_model(pose, topology, rho);
  if (sigma2 == 0.0) return y;
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::InvalidParameter, "sigma2 must be non-negative");
  const double sigma = std::sqrt(sigma2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sigma * standard_normal(rng);
  return y;
}

}  // namespace nfloc
