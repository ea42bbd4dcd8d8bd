#pragma once

#include <functional>

#include <Eigen/Core>

namespace nfloc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ResidualProblem {
  Eigen::Index parameters = 0;  // k
  Eigen::Index residuals = 0;   // m >= k
  std::function<VectorXd(const VectorXd&)> residual;
  // Optional; forward differences are used when empty.
  std::function<MatrixXd(const VectorXd&)> jacobian;
};

struct SolverOptions {
  int max_iterations = 1000;
  // Terminate once a proposed update satisfies ||dx|| < min_step (1 + ||x||).
  double min_step = 1e-6;
  // lambda_0 = initial_damping * mean(diag(J^T J))
  double initial_damping = 1e-3;
  double damping_increase = 10.0;
  double damping_decrease = 10.0;
  // Terminate when ||J^T r||_inf <= gradient_tolerance.
  double gradient_tolerance = 1e-10;
  double fd_relative_step = 1e-7;
};

enum class Termination {
  StepTolerance,
  GradientTolerance,
  MaxIterations,
  NumericalFailure,
  Direct,  // closed-form estimate, no iterations
};

const char* to_string(Termination t);

struct SolverResult {
  VectorXd argmin;
  double cost = 0.0;  // ||r(argmin)||^2
  int iterations = 0; // accepted updates
  Termination termination = Termination::MaxIterations;
};

// Levenberg-Marquardt with multiplicative damping: an update that lowers the
// cost is accepted and the damping divided; otherwise the damping is
// multiplied and the update recomputed (retries are not iterations).
// A non-finite residual terminates with NumericalFailure and the last good
// iterate.
SolverResult solve(const ResidualProblem& problem, const VectorXd& x0,
                   const SolverOptions& options = {});

// Forward-difference Jacobian with step fd_relative_step * max(1, |x_i|).
MatrixXd finite_difference_jacobian(const std::function<VectorXd(const VectorXd&)>& residual,
                                    const VectorXd& x, const VectorXd& r_at_x,
                                    double relative_step);

}  // namespace nfloc
