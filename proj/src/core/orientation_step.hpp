#pragma once

#include <Eigen/Core>

#include "core/physics.hpp"
#include "core/poly_roots.hpp"

namespace nfloc {

using DesignMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// Tolerances of the norm-constrained least-squares solver.
struct ConstrainedLSTolerances {
  double rank = 1e-12;          // smallest / largest singular value
  double degenerate_rhs = 1e-14; // max |c_i| / ||rhs||
  double merge_spectrum = 1e-10; // relative gap below which mu_i are merged
  double secular = 1e-8;        // |sum mu c^2/(mu+lambda)^2 - 1| after root selection
};

// min ||A o - rhs||^2 subject to ||o|| = 1, A is N x 3.
struct ConstrainedLSInstance {
  DesignMatrix design;
  Eigen::VectorXd rhs;
};

struct ConstrainedLSSolution {
  UnitVec3 o_hat;
  double lambda_star = 0.0;
  double cost = 0.0;
  Eigen::Vector3d spectrum = Eigen::Vector3d::Zero();      // mu_i, squared singular values
  Eigen::Vector3d coefficients = Eigen::Vector3d::Zero();  // c_i = u_i^T rhs
};

// Secular polynomial prod_g (mu_g + l)^2 - sum_g w_g prod_{h != g} (mu_h + l)^2
// with w_g = mu_g * (sum of c_i^2 over group g); groups merge mu_i within
// merge_tolerance. Degree is twice the number of distinct mu.
Polynomial secular_polynomial(const Eigen::Vector3d& spectrum,
                              const Eigen::Vector3d& coefficients,
                              double merge_tolerance = 1e-10);

// sum_i mu_i c_i^2 / (mu_i + lambda)^2
double secular_norm_squared(const Eigen::Vector3d& spectrum,
                            const Eigen::Vector3d& coefficients, double lambda);

// o(lambda*) = (A^T A + lambda* I)^-1 A^T rhs where lambda* is the largest
// real root of the secular polynomial. Throws RankDeficient or DegenerateRhs.
ConstrainedLSSolution solve_constrained(const ConstrainedLSInstance& instance,
                                        const ConstrainedLSTolerances& tol = {});

// Rows b_n(p)^T and distances d_n(p); throws SingularGeometryError.
struct PositionDesign {
  DesignMatrix fields;       // B_p^T
  Eigen::VectorXd distances; // diag of D_p
};
PositionDesign position_design(const Vec3& p, const AnchorTopology& topology);

// ML orientation at hypothesis p: A = rho D_p^-3 B_p^T, rhs = y.
ConstrainedLSSolution orientation_given_position(const Vec3& p, const MeasurementVector& y,
                                                 const AnchorTopology& topology, double rho);

// Scaled variant: A = B_p^T, rhs = j_hat.
ConstrainedLSSolution orientation_given_position_scaled(const Vec3& p,
                                                        const Eigen::VectorXd& j_hat,
                                                        const AnchorTopology& topology);

// j_hat = rho^-1 D_p^3 y
Eigen::VectorXd scaled_observations(const Eigen::VectorXd& distances, const MeasurementVector& y,
                                    double rho);

}  // namespace nfloc
