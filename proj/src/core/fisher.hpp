#pragma once

#include <string>

#include <Eigen/Core>

#include "core/physics.hpp"

namespace nfloc {

// d s_n / d beta with beta = [p_x, p_y, p_z, phi, theta].
using SignalGradient = Eigen::Matrix<double, 5, 1>;
using FisherMatrix = Eigen::Matrix<double, 5, 5>;

inline constexpr double kDefaultConditionCap = 1e12;

struct BoundReport {
  double peb = 0.0;                    // m
  double naive_peb = 0.0;              // m, orientation treated as known
  double angle_bound_phi = 0.0;        // rad
  double angle_bound_theta = 0.0;      // rad
  double angle_bound_rms = 0.0;        // sqrt((J^-1)_44 + (J^-1)_55), rad
  double naive_angle_bound_rms = 0.0;  // position treated as known, rad
  double fim_condition = 0.0;
};

// Analytic gradient: spatial part (rho/d^3)(db^T/dp - (3/d) e b^T) o with
// db^T/dp = (3/2d)(o_n e^T + (o_n^T e)(I - 2 e e^T)); angular parts
// (rho/d^3) b^T do/dphi and (rho/d^3) b^T do/dtheta.
SignalGradient signal_gradient(const Pose& agent, const Anchor& anchor, double rho);

// -(1/2 sigma^2) sum_n (s_n(beta) - y_n)^2
double log_likelihood(const Pose& beta, const MeasurementVector& y,
                      const AnchorTopology& topology, double rho, double sigma2);

FisherMatrix fisher_matrix(const Pose& beta, const AnchorTopology& topology, double rho,
                           double sigma2);

// Throws UnboundedPoseError when cond(J) exceeds condition_cap.
BoundReport bounds(const Pose& beta, const AnchorTopology& topology, double rho, double sigma2,
                   double condition_cap = kDefaultConditionCap);

// PEB with the agent orientation fixed and known (3x3 position-block FIM).
double known_orientation_peb(const Vec3& position, const UnitVec3& orientation,
                             const AnchorTopology& topology, double rho, double sigma2,
                             double condition_cap = kDefaultConditionCap);

// Column order of bound_report_csv_row().
std::string bound_report_csv_header();
std::string bound_report_csv_row(const BoundReport& report);

}  // namespace nfloc
