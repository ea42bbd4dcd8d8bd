#pragma once

#include <cmath>
#include <numbers>

#include "core/physics.hpp"
#include "core/rng.hpp"
#include "core/topology.hpp"

namespace nfloc::test {

inline constexpr double kPi = std::numbers::pi;

inline Vec3 random_point(Rng& rng, double lo, double hi) {
  return Vec3(uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi));
}

inline Anchor random_anchor(Rng& rng) {
  Anchor a;
  a.position = random_point(rng, -5.0, 5.0);
  a.orientation = uniform_on_sphere(rng);
  return a;
}

// Pose whose position is at least min_distance from `anchor` and whose polar
// angle stays away from the poles.
inline Pose random_pose_near(Rng& rng, const Vec3& anchor, double min_distance) {
  Pose p;
  do {
    p.position = random_point(rng, -5.0, 5.0);
  } while ((p.position - anchor).norm() < min_distance);
  p.orientation.phi = uniform(rng, 0.0, 2 * kPi);
  p.orientation.theta = uniform(rng, 0.2, kPi - 0.2);
  return p;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// Reference scenario: 12 anchors in a 10 x 10 x 3 m room with the tabulated
// received and noise powers.
struct Reference {
  Room room;
  AnchorTopology topo = generate_topology(12, room);
  PhysicalParams params = PhysicalParams::reference();
  double rho = effective_rho(params);
  double sigma2 = effective_sigma2(params);
};

}  // namespace nfloc::test
