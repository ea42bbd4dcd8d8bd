#include "core/fisher.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "core/table.hpp"

namespace nfloc {

namespace {

template <int Dim>
Eigen::Matrix<double, Dim, Dim> guarded_inverse(const Eigen::Matrix<double, Dim, Dim>& m,
                                                double condition_cap, double* condition) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, Dim, Dim>> eig(m);
  const auto& ev = eig.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  const double cond = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  if (condition) *condition = cond;
  if (!(cond <= condition_cap)) {
    throw UnboundedPoseError(cond, "Fisher information is singular or ill-conditioned (cond = " +
                                       format_real(cond) + ")");
  }
  // Position and angle entries differ by many orders of magnitude; invert the
  // equilibrated matrix so the error tracks its much smaller condition number.
  const Eigen::Matrix<double, Dim, 1> d = m.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::Matrix<double, Dim, Dim> scaled = d.asDiagonal() * m * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, Dim, Dim>> se(scaled);
  const Eigen::Matrix<double, Dim, Dim> scaled_inv =
      se.eigenvectors() * se.eigenvalues().cwiseInverse().asDiagonal() *
      se.eigenvectors().transpose();
  return d.asDiagonal() * scaled_inv * d.asDiagonal();
}

}  // namespace

SignalGradient signal_gradient(const Pose& agent, const Anchor& anchor, double rho) {
  const LinkGeometry g = link_geometry(agent.position, anchor);
  const double d = g.distance;
  const Vec3& e = g.direction.vec();
  const Vec3& b = g.scaled_field;
  const Vec3& on = anchor.orientation.vec();

  const double phi = agent.orientation.phi;
  const double theta = agent.orientation.theta;
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  const Vec3 o(cp * st, sp * st, ct);
  const Vec3 do_dphi = Vec3(-sp, cp, 0.0) * st;
  const Vec3 do_dtheta(cp * ct, sp * ct, -st);

  const double amp = rho / (d * d * d);
  const Mat3 db_t_dp =
      1.5 / d * (on * e.transpose() + on.dot(e) * (Mat3::Identity() - 2.0 * e * e.transpose()));
  const Vec3 ds_dp = amp * (db_t_dp - 3.0 / d * e * b.transpose()) * o;

  SignalGradient grad;
  grad.head<3>() = ds_dp;
  grad[3] = amp * b.dot(do_dphi);
  grad[4] = amp * b.dot(do_dtheta);
  return grad;
}

double log_likelihood(const Pose& beta, const MeasurementVector& y,
                      const AnchorTopology& topology, double rho, double sigma2) {
  if (static_cast<std::size_t>(y.size()) != topology.size()) {
    throw Error(ErrorCode::DimensionMismatch, "measurement length " + std::to_string(y.size()) +
                                                  " does not match " +
                                                  std::to_string(topology.size()) + " anchors");
  }
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::InvalidParameter, "sigma2 must be positive");
  const MeasurementVector s = forward_model(beta, topology, rho);
  return -(s - y).squaredNorm() / (2.0 * sigma2);
}

FisherMatrix fisher_matrix(const Pose& beta, const AnchorTopology& topology, double rho,
                           double sigma2) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::InvalidParameter, "sigma2 must be positive");
  FisherMatrix j = FisherMatrix::Zero();
  for (const auto& anchor : topology) {
    const SignalGradient g = signal_gradient(beta, anchor, rho);
    j.noalias() += g * g.transpose();
  }
  return j / sigma2;
}

BoundReport bounds(const Pose& beta, const AnchorTopology& topology, double rho, double sigma2,
                   double condition_cap) {
  const FisherMatrix j = fisher_matrix(beta, topology, rho, sigma2);
  BoundReport r;
  const FisherMatrix inv = guarded_inverse<5>(j, condition_cap, &r.fim_condition);
  r.peb = std::sqrt(inv.topLeftCorner<3, 3>().trace());
  r.angle_bound_phi = std::sqrt(inv(3, 3));
  r.angle_bound_theta = std::sqrt(inv(4, 4));
  r.angle_bound_rms = std::sqrt(inv(3, 3) + inv(4, 4));

  // Naive bounds: block first, then invert.
  const Mat3 pos_inv = guarded_inverse<3>(Mat3(j.topLeftCorner<3, 3>()),
                                          std::numeric_limits<double>::infinity(), nullptr);
  r.naive_peb = std::sqrt(pos_inv.trace());
  const Eigen::Matrix2d ang_inv =
      guarded_inverse<2>(Eigen::Matrix2d(j.bottomRightCorner<2, 2>()),
                         std::numeric_limits<double>::infinity(), nullptr);
  r.naive_angle_bound_rms = std::sqrt(ang_inv.trace());
  return r;
}

double known_orientation_peb(const Vec3& position, const UnitVec3& orientation,
                             const AnchorTopology& topology, double rho, double sigma2,
                             double condition_cap) {
  Pose pose{position, spherical_from_orientation(orientation)};
  // Spatial gradient does not depend on the angle parametrization.
  Mat3 j = Mat3::Zero();
  for (const auto& anchor : topology) {
    const Vec3 g = signal_gradient(pose, anchor, rho).head<3>();
    j.noalias() += g * g.transpose();
  }
  j /= sigma2;
  double cond = 0.0;
  const Mat3 inv = guarded_inverse<3>(j, condition_cap, &cond);
  return std::sqrt(inv.trace());
}

std::string bound_report_csv_header() {
  return "peb_m,naive_peb_m,angle_bound_phi_rad,angle_bound_theta_rad,angle_bound_rms_rad,"
         "naive_angle_bound_rms_rad,fim_condition";
}

std::string bound_report_csv_row(const BoundReport& r) {
  return format_real(r.peb) + ',' + format_real(r.naive_peb) + ',' +
         format_real(r.angle_bound_phi) + ',' + format_real(r.angle_bound_theta) + ',' +
         format_real(r.angle_bound_rms) + ',' + format_real(r.naive_angle_bound_rms) + ',' +
         format_real(r.fim_condition);
}

}  // namespace nfloc
