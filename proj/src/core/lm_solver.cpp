#include "core/lm_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "core/error.hpp"

namespace nfloc {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::StepTolerance: return "step-tolerance";
    case Termination::GradientTolerance: return "gradient-tolerance";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::NumericalFailure: return "numerical-failure";
    case Termination::Direct: return "direct";
  }
  return "unknown";
}

MatrixXd finite_difference_jacobian(const std::function<VectorXd(const VectorXd&)>& residual,
                                    const VectorXd& x, const VectorXd& r_at_x,
                                    double relative_step) {
  MatrixXd jac(r_at_x.size(), x.size());
  VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = relative_step * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const double actual = xp[i] - x[i];
    jac.col(i) = (residual(xp) - r_at_x) / actual;
    xp[i] = x[i];
  }
  return jac;
}

SolverResult solve(const ResidualProblem& problem, const VectorXd& x0,
                   const SolverOptions& options) {
  if (!problem.residual) throw Error(ErrorCode::InvalidArgument, "residual evaluator missing");
  if (x0.size() != problem.parameters || !x0.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "initial point must be finite with k entries");
  }
  if (problem.residuals < problem.parameters) {
    throw Error(ErrorCode::InvalidArgument, "need at least as many residuals as parameters");
  }

  auto jacobian_at = [&](const VectorXd& x, const VectorXd& r) -> MatrixXd {
    if (problem.jacobian) return problem.jacobian(x);
    return finite_difference_jacobian(problem.residual, x, r, options.fd_relative_step);
  };

  SolverResult result;
  result.argmin = x0;
  VectorXd r = problem.residual(x0);
  if (r.size() != problem.residuals) {
    throw Error(ErrorCode::DimensionMismatch, "residual evaluator returned wrong length");
  }
  if (!r.allFinite()) {
    result.cost = std::numeric_limits<double>::infinity();
    result.termination = Termination::NumericalFailure;
    return result;
  }
  result.cost = r.squaredNorm();

  VectorXd& x = result.argmin;
  MatrixXd jac = jacobian_at(x, r);
  if (!jac.allFinite()) {
    result.termination = Termination::NumericalFailure;
    return result;
  }
  MatrixXd jtj = jac.transpose() * jac;
  VectorXd g = jac.transpose() * r;

  const double k = static_cast<double>(problem.parameters);
  double lambda = options.initial_damping * jtj.diagonal().sum() / k;
  if (!(lambda > 0.0) || !std::isfinite(lambda)) lambda = options.initial_damping;
  const MatrixXd eye = MatrixXd::Identity(problem.parameters, problem.parameters);
  // Repeated decreases would otherwise underflow to 0, after which increases
  // can never restore it.
  const double lambda_floor = std::numeric_limits<double>::min();

  while (true) {
    if (g.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      result.termination = Termination::GradientTolerance;
      return result;
    }
    if (result.iterations >= options.max_iterations) {
      result.termination = Termination::MaxIterations;
      return result;
    }

    // Damping retries until an update lowers the cost or becomes negligible.
    bool accepted = false;
    while (!accepted) {
      const VectorXd step = (jtj + lambda * eye).ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= options.damping_increase;
        if (!std::isfinite(lambda)) {
          result.termination = Termination::NumericalFailure;
          return result;
        }
        continue;
      }
      if (step.norm() < options.min_step * (1.0 + x.norm())) {
        result.termination = Termination::StepTolerance;
        return result;
      }
      const VectorXd x_new = x + step;
      const VectorXd r_new = problem.residual(x_new);
      if (!r_new.allFinite()) {
        result.termination = Termination::NumericalFailure;
        return result;
      }
      const double cost_new = r_new.squaredNorm();
      if (cost_new < result.cost) {
        x = x_new;
        r = r_new;
        result.cost = cost_new;
        ++result.iterations;
        lambda = std::max(lambda / options.damping_decrease, lambda_floor);
        accepted = true;
      } else {
        lambda *= options.damping_increase;
      }
    }

    jac = jacobian_at(x, r);
    if (!jac.allFinite()) {
      result.termination = Termination::NumericalFailure;
      return result;
    }
    jtj.noalias() = jac.transpose() * jac;
    g.noalias() = jac.transpose() * r;
  }
}

}  // namespace nfloc
