#pragma once

#include "core/estimators.hpp"
#include "core/physics.hpp"
#include "core/rng.hpp"

namespace nfloc {

struct Room {
  double side_x = 10.0;  // m
  double side_y = 10.0;  // m
  double height = 3.0;   // m

  Box bounds() const { return Box{Vec3::Zero(), Vec3(side_x, side_y, height)}; }
};

void validate(const Room& room);

inline constexpr double kDeploymentMargin = 0.2;  // m from every wall

// Anchors go round-robin to the walls y = 0, x = side_x, y = side_y, x = 0,
// evenly spaced along each wall at (j + 1/2) / m of its length. Anchor k
// mounts at height {1/6, 1/2, 5/6}[k mod 3] * room height, facing inward.
AnchorTopology generate_topology(std::size_t anchor_count, const Room& room);

// Position uniform in the room shrunk by kDeploymentMargin, orientation
// uniform on the sphere.
Pose sample_deployment(Rng& rng, const Room& room);

// y = forward_model + i.i.d. N(0, sigma2).
MeasurementVector simulate_measurement(Rng& rng, const Pose& pose, const AnchorTopology& topology,
                                       double rho, double sigma2);

}  // namespace nfloc
