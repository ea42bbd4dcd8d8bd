#include "core/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "core/fisher.hpp"
#include "core/orientation_step.hpp"
#include "core/rng.hpp"

namespace nfloc {

namespace {

void check_inputs(const MeasurementVector& y, const AnchorTopology& topology, double rho) {
  if (static_cast<std::size_t>(y.size()) != topology.size()) {
    throw Error(ErrorCode::DimensionMismatch, "measurement length does not match topology");
  }
  if (!y.allFinite()) throw Error(ErrorCode::InvalidArgument, "measurements must be finite");
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidParameter, "rho must be positive");
}

void check_sigma2(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw Error(ErrorCode::InvalidParameter, "sigma2 must be positive");
  }
}

// Pathological hypotheses (p on an anchor, rank-deficient inner step) get a
// uniform residual worth 1e6 times the best cost seen so far.
class PenalizedResidual {
 public:
  explicit PenalizedResidual(Eigen::Index m) : m_(m) {}

  template <typename Fn>
  VectorXd operator()(Fn&& fn) {
    try {
      VectorXd r = fn();
      if (r.allFinite()) {
        best_ = std::min(best_, r.squaredNorm());
        return r;
      }
    } catch (const Error&) {
    }
    const double base = std::isfinite(best_) && best_ > 0.0 ? best_ : 1.0;
    return VectorXd::Constant(m_, std::sqrt(1e6 * base / static_cast<double>(m_)));
  }

 private:
  Eigen::Index m_;
  double best_ = std::numeric_limits<double>::infinity();
};

Pose pose_from_solution(const Vec3& p, const UnitVec3& o) {
  return Pose{p, spherical_from_orientation(o)};
}

}  // namespace

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ML5D: return "ML5D";
    case Algorithm::ML3D: return "ML3D";
    case Algorithm::WLS: return "WLS";
    case Algorithm::Cascade: return "CASCADE";
    case Algorithm::Baseline: return "BASELINE";
  }
  return "UNKNOWN";
}

Algorithm parse_algorithm(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "ml5d") return Algorithm::ML5D;
  if (lower == "ml3d") return Algorithm::ML3D;
  if (lower == "wls") return Algorithm::WLS;
  if (lower == "cascade") return Algorithm::Cascade;
  if (lower == "baseline" || lower == "strongest-anchor") return Algorithm::Baseline;
  throw Error(ErrorCode::Config, "unknown algorithm '" + name + "'");
}

double ml_cost(const Pose& pose, const MeasurementVector& y, const AnchorTopology& topology,
               double rho) {
  check_inputs(y, topology, rho);
  return (forward_model(pose, topology, rho) - y).squaredNorm();
}

PoseEstimate ml5d(const MeasurementVector& y, const AnchorTopology& topology, double rho,
                  double sigma2, const Pose& init, const SolverOptions& options) {
  check_inputs(y, topology, rho);
  check_sigma2(sigma2);
  const double sigma = std::sqrt(sigma2);
  const auto m = static_cast<Eigen::Index>(topology.size());

  auto to_pose = [](const VectorXd& beta) {
    return Pose{beta.head<3>(), SphericalOrientation{beta[3], beta[4]}};
  };

  PenalizedResidual penalized(m);
  ResidualProblem problem;
  problem.parameters = 5;
  problem.residuals = m;
  problem.residual = [&](const VectorXd& beta) {
    return penalized([&] { return VectorXd((forward_model(to_pose(beta), topology, rho) - y) / sigma); });
  };
  problem.jacobian = [&](const VectorXd& beta) {
    const Pose pose = to_pose(beta);
    MatrixXd jac(m, 5);
    for (const auto& anchor : topology) {
      jac.row(static_cast<Eigen::Index>(anchor.index)) =
          signal_gradient(pose, anchor, rho).transpose() / sigma;
    }
    return jac;
  };

  VectorXd x0(5);
  x0 << init.position, init.orientation.phi, init.orientation.theta;
  const SolverResult res = solve(problem, x0, options);

  PoseEstimate est;
  est.algorithm = Algorithm::ML5D;
  est.pose = to_pose(res.argmin);
  est.pose.orientation = canonicalize(est.pose.orientation);
  est.residual_cost = sigma2 * res.cost;
  est.iterations = res.iterations;
  est.termination = res.termination;
  return est;
}

PoseEstimate ml3d(const MeasurementVector& y, const AnchorTopology& topology, double rho,
                  double sigma2, const Vec3& init, const SolverOptions& options) {
  check_inputs(y, topology, rho);
  check_sigma2(sigma2);
  const double sigma = std::sqrt(sigma2);
  const auto m = static_cast<Eigen::Index>(topology.size());
  const VectorXd y_white = y / sigma;

  auto whitened_step = [&](const Vec3& p) {
    const PositionDesign pd = position_design(p, topology);
    const VectorXd amp = (rho / sigma) * pd.distances.array().cube().inverse();
    ConstrainedLSInstance inst{amp.asDiagonal() * pd.fields, y_white};
    const ConstrainedLSSolution sol = solve_constrained(inst);
    return std::pair{inst, sol};
  };

  PenalizedResidual penalized(m);
  ResidualProblem problem;
  problem.parameters = 3;
  problem.residuals = m;
  problem.residual = [&](const VectorXd& p) {
    return penalized([&] {
      const auto [inst, sol] = whitened_step(p);
      return VectorXd(inst.design * sol.o_hat.vec() - inst.rhs);
    });
  };

  const SolverResult res = solve(problem, init, options);
  PoseEstimate est;
  est.algorithm = Algorithm::ML3D;
  est.iterations = res.iterations;
  est.termination = res.termination;
  const Vec3 p = res.argmin;
  try {
    const auto [inst, sol] = whitened_step(p);
    est.pose = pose_from_solution(p, sol.o_hat);
    est.residual_cost = sigma2 * sol.cost;
  } catch (const Error&) {
    est.pose = Pose{p, {}};
    est.residual_cost = std::numeric_limits<double>::infinity();
    est.termination = Termination::NumericalFailure;
  }
  return est;
}

PoseEstimate wls(const MeasurementVector& y, const AnchorTopology& topology, double rho,
                 const Vec3& init, const SolverOptions& options) {
  check_inputs(y, topology, rho);
  const auto m = static_cast<Eigen::Index>(topology.size());

  auto scaled_step = [&](const Vec3& p) {
    const PositionDesign pd = position_design(p, topology);
    ConstrainedLSInstance inst{pd.fields, scaled_observations(pd.distances, y, rho)};
    const ConstrainedLSSolution sol = solve_constrained(inst);
    return std::pair{inst, sol};
  };

  PenalizedResidual penalized(m);
  ResidualProblem problem;
  problem.parameters = 3;
  problem.residuals = m;
  problem.residual = [&](const VectorXd& p) {
    return penalized([&] {
      const auto [inst, sol] = scaled_step(p);
      return VectorXd(inst.design * sol.o_hat.vec() - inst.rhs);
    });
  };

  const SolverResult res = solve(problem, init, options);
  PoseEstimate est;
  est.algorithm = Algorithm::WLS;
  est.iterations = res.iterations;
  est.termination = res.termination;
  const Vec3 p = res.argmin;
  try {
    const auto [inst, sol] = scaled_step(p);
    est.pose = pose_from_solution(p, sol.o_hat);
    est.residual_cost = sol.cost;
  } catch (const Error&) {
    est.pose = Pose{p, {}};
    est.residual_cost = std::numeric_limits<double>::infinity();
    est.termination = Termination::NumericalFailure;
  }
  return est;
}

PoseEstimate cascade(const MeasurementVector& y, const AnchorTopology& topology, double rho,
                     double sigma2, const Vec3& init, const SolverOptions& options) {
  const PoseEstimate first = wls(y, topology, rho, init, options);
  PoseEstimate second = ml3d(y, topology, rho, sigma2, first.pose.position, options);
  second.algorithm = Algorithm::Cascade;
  second.refine_iterations = second.iterations;
  second.iterations += first.iterations;
  return second;
}

PoseEstimate strongest_anchor(const MeasurementVector& y, const AnchorTopology& topology) {
  if (static_cast<std::size_t>(y.size()) != topology.size()) {
    throw Error(ErrorCode::DimensionMismatch, "measurement length does not match topology");
  }
  std::size_t best = 0;
  for (std::size_t n = 1; n < topology.size(); ++n) {
    const auto i = static_cast<Eigen::Index>(n);
    const auto b = static_cast<Eigen::Index>(best);
    if (y[i] * y[i] > y[b] * y[b]) best = n;
  }
  PoseEstimate est;
  est.algorithm = Algorithm::Baseline;
  est.pose.position = topology[best].position;
  est.has_orientation = false;
  est.termination = Termination::Direct;
  return est;
}

PoseEstimate estimate(Algorithm algorithm, const MeasurementVector& y,
                      const AnchorTopology& topology, double rho, double sigma2, const Pose& init,
                      const SolverOptions& options) {
  switch (algorithm) {
    case Algorithm::ML5D: return ml5d(y, topology, rho, sigma2, init, options);
    case Algorithm::ML3D: return ml3d(y, topology, rho, sigma2, init.position, options);
    case Algorithm::WLS: return wls(y, topology, rho, init.position, options);
    case Algorithm::Cascade: return cascade(y, topology, rho, sigma2, init.position, options);
    case Algorithm::Baseline: return strongest_anchor(y, topology);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm");
}

InitSampler::InitSampler(Box box, std::uint64_t seed) : box_(std::move(box)), seed_(seed) {
  if (!(box_.upper.array() > box_.lower.array()).all()) {
    throw Error(ErrorCode::InvalidArgument, "init sampler box is empty");
  }
}

Pose InitSampler::draw(std::uint64_t k) const {
  Rng rng(derive_seed(seed_, k));
  Pose pose;
  for (int i = 0; i < 3; ++i) pose.position[i] = uniform(rng, box_.lower[i], box_.upper[i]);
  pose.orientation = spherical_from_orientation(uniform_on_sphere(rng));
  return pose;
}

MultiStartResult multi_start(Algorithm algorithm, const MeasurementVector& y,
                             const AnchorTopology& topology, double rho, double sigma2, int starts,
                             const InitSampler& sampler, const SolverOptions& options) {
  if (starts < 1) throw Error(ErrorCode::InvalidArgument, "multi-start needs K >= 1");
  MultiStartResult out;
  bool have = false;
  for (int k = 0; k < starts; ++k) {
    PoseEstimate est;
    try {
      est = estimate(algorithm, y, topology, rho, sigma2,
                     sampler.draw(static_cast<std::uint64_t>(k)), options);
    } catch (const Error&) {
      ++out.failed_runs;
      continue;
    }
    out.total_iterations += est.iterations;
    if (!std::isfinite(est.residual_cost)) {
      ++out.failed_runs;
      continue;
    }
    if (!have || est.residual_cost < out.best.residual_cost) {
      out.best = est;
      out.best_run = static_cast<std::size_t>(k);
      have = true;
    }
  }
  if (!have) throw Error(ErrorCode::NumericalFailure, "all multi-start runs failed");
  return out;
}

}  // namespace nfloc
