#pragma once

#include <cstdint>
#include <string>

#include "core/lm_solver.hpp"
#include "core/physics.hpp"

namespace nfloc {

enum class Algorithm { ML5D, ML3D, WLS, Cascade, Baseline };

const char* to_string(Algorithm a);
// Accepts ml5d, ml3d, wls, cascade, baseline (case-insensitive).
Algorithm parse_algorithm(const std::string& name);

struct PoseEstimate {
  Pose pose;
  bool has_orientation = true;  // false for the strongest-anchor baseline
  // ML5D, ML3D, CASCADE: sum (s_n - y_n)^2 in W. WLS: scaled metric
  // ||B^T o - j_hat||^2. BASELINE: 0.
  double residual_cost = 0.0;
  int iterations = 0;            // accepted solver updates, all stages
  int refine_iterations = 0;     // CASCADE: iterations of the ML3D stage
  Termination termination = Termination::Direct;
  Algorithm algorithm = Algorithm::Baseline;
};

// Sum of squared signal residuals at a pose, in W.
double ml_cost(const Pose& pose, const MeasurementVector& y, const AnchorTopology& topology,
               double rho);

// 5D LM on (p, phi, theta) with the analytic Jacobian. Residuals are whitened
// by sigma internally; angles iterate unconstrained and are canonicalized on
// output.
PoseEstimate ml5d(const MeasurementVector& y, const AnchorTopology& topology, double rho,
                  double sigma2, const Pose& init, const SolverOptions& options = {});

// 3D LM on p; every residual evaluation solves the unscaled ML orientation
// step at the hypothesis.
PoseEstimate ml3d(const MeasurementVector& y, const AnchorTopology& topology, double rho,
                  double sigma2, const Vec3& init, const SolverOptions& options = {});

// 3D LM on the distance-scaled cost ||B_p^T o_p - j_hat(p)||^2, with both
// j_hat and the scaled orientation step recomputed at every hypothesis p.
PoseEstimate wls(const MeasurementVector& y, const AnchorTopology& topology, double rho,
                 const Vec3& init, const SolverOptions& options = {});

// WLS followed by ML3D started at the WLS position.
PoseEstimate cascade(const MeasurementVector& y, const AnchorTopology& topology, double rho,
                     double sigma2, const Vec3& init, const SolverOptions& options = {});

// Position of the anchor with the largest y_n^2; lowest index wins ties.
PoseEstimate strongest_anchor(const MeasurementVector& y, const AnchorTopology& topology);

// Dispatch; position-only algorithms ignore init.orientation.
PoseEstimate estimate(Algorithm algorithm, const MeasurementVector& y,
                      const AnchorTopology& topology, double rho, double sigma2,
                      const Pose& init, const SolverOptions& options = {});

struct Box {
  Vec3 lower = Vec3::Zero();
  Vec3 upper = Vec3::Zero();
};

// Uniform initial positions in a box and uniform orientations on the sphere.
// Draw k depends only on (seed, k).
class InitSampler {
 public:
  InitSampler(Box box, std::uint64_t seed);

  Pose draw(std::uint64_t k) const;
  const Box& box() const { return box_; }
  std::uint64_t seed() const { return seed_; }

 private:
  Box box_;
  std::uint64_t seed_;
};

struct MultiStartResult {
  PoseEstimate best;
  std::size_t best_run = 0;
  int total_iterations = 0;
  int failed_runs = 0;
};

// K independent runs from sampler draws 0..K-1; keeps the smallest
// residual_cost in the algorithm's own metric (first run wins ties).
MultiStartResult multi_start(Algorithm algorithm, const MeasurementVector& y,
                             const AnchorTopology& topology, double rho, double sigma2, int starts,
                             const InitSampler& sampler, const SolverOptions& options = {});

}  // namespace nfloc
