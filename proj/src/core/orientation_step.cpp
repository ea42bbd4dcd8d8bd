#include "core/orientation_step.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/SVD>

namespace nfloc {

namespace {

struct SpectralGroup {
  double mu;
  double weight;  // mu * sum c_i^2
};

std::vector<SpectralGroup> merge_spectrum(const Eigen::Vector3d& mu, const Eigen::Vector3d& c,
                                          double tol) {
  std::vector<SpectralGroup> groups;
  for (int i = 0; i < 3; ++i) {
    bool merged = false;
    for (auto& g : groups) {
      if (std::abs(mu[i] - g.mu) <= tol * std::max(std::abs(mu[i]), std::abs(g.mu))) {
        g.weight += mu[i] * c[i] * c[i];
        merged = true;
        break;
      }
    }
    if (!merged) groups.push_back({mu[i], mu[i] * c[i] * c[i]});
  }
  return groups;
}

}  // namespace

Polynomial secular_polynomial(const Eigen::Vector3d& spectrum, const Eigen::Vector3d& coefficients,
                              double merge_tolerance) {
  const auto groups = merge_spectrum(spectrum, coefficients, merge_tolerance);
  std::vector<Polynomial> squares;
  for (const auto& g : groups) {
    const double lin[2] = {g.mu, 1.0};
    squares.push_back(poly_multiply(lin, lin));
  }
  Polynomial all{1.0};
  for (const auto& sq : squares) all = poly_multiply(all, sq);

  Polynomial result = all;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Polynomial others{1.0};
    for (std::size_t h = 0; h < groups.size(); ++h) {
      if (h != g) others = poly_multiply(others, squares[h]);
    }
    result = poly_add(result, poly_scale(others, -groups[g].weight));
  }
  return result;
}

double secular_norm_squared(const Eigen::Vector3d& mu, const Eigen::Vector3d& c, double lambda) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double den = mu[i] + lambda;
    acc += mu[i] * c[i] * c[i] / (den * den);
  }
  return acc;
}

ConstrainedLSSolution solve_constrained(const ConstrainedLSInstance& instance,
                                        const ConstrainedLSTolerances& tol) {
  const DesignMatrix& a = instance.design;
  const Eigen::VectorXd& rhs = instance.rhs;
  if (a.rows() != rhs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "design rows and rhs length differ");
  }
  if (a.rows() < 3) {
    throw Error(ErrorCode::RankDeficient, "orientation step needs at least 3 observations");
  }
  if (!a.allFinite() || !rhs.allFinite()) {
    throw Error(ErrorCode::NumericalFailure, "non-finite orientation-step input");
  }

  Eigen::JacobiSVD<DesignMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[2] <= tol.rank * sv[0]) {
    throw Error(ErrorCode::RankDeficient, "design matrix does not have rank 3");
  }
  const Eigen::Vector3d mu = sv.cwiseAbs2();
  const Eigen::Vector3d c = svd.matrixU().transpose() * rhs;
  const double rhs_norm = rhs.norm();
  if (!(rhs_norm > 0.0) || c.cwiseAbs().maxCoeff() < tol.degenerate_rhs * rhs_norm) {
    throw Error(ErrorCode::DegenerateRhs, "observations orthogonal to the design range");
  }

  // Work with lambda = s t so the polynomial coefficients are O(1).
  const double s = mu[0];
  const Eigen::Vector3d mu_s = mu / s;
  const Eigen::Vector3d c_s = c / std::sqrt(s);

  const Polynomial poly = secular_polynomial(mu_s, c_s, tol.merge_spectrum);
  const std::vector<double> roots = real_roots(poly);

  // On (-mu_min, inf) the secular function decreases monotonically from
  // +inf to -1, so the largest real root is the unique root there. Polish
  // the companion estimate with bracketed Newton.
  auto f = [&](double t) { return secular_norm_squared(mu_s, c_s, t) - 1.0; };
  auto df = [&](double t) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double den = mu_s[i] + t;
      acc += -2.0 * mu_s[i] * c_s[i] * c_s[i] / (den * den * den);
    }
    return acc;
  };

  double lo = -mu_s[2];
  const double weight = (mu_s.array() * c_s.array().square()).sum();
  double hi = std::sqrt(weight);
  while (!(f(hi) < 0.0)) hi = 2.0 * hi + 1.0;
  const double probe = lo + 1e-12 * std::max(1.0, std::abs(lo));
  if (!(f(probe) > 0.0)) {
    throw Error(ErrorCode::DegenerateRhs,
                "secular equation has no root above -mu_min (measure-zero hard case)");
  }

  double t = 0.5 * (lo + hi);
  if (!roots.empty() && roots.front() > lo && roots.front() < hi) t = roots.front();
  for (int iter = 0; iter < 200; ++iter) {
    const double ft = f(t);
    if (ft == 0.0) break;
    if (ft > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    double next = t - ft / df(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 4e-16 * std::max(1.0, std::abs(t))) {
      t = next;
      break;
    }
    t = next;
  }

  ConstrainedLSSolution sol;
  sol.lambda_star = s * t;
  sol.spectrum = mu;
  sol.coefficients = c;

  Eigen::Vector3d weights;
  for (int i = 0; i < 3; ++i) weights[i] = sv[i] * c[i] / (mu[i] + sol.lambda_star);
  const Vec3 o = svd.matrixV() * weights;
  if (std::abs(o.squaredNorm() - 1.0) > tol.secular || !o.allFinite()) {
    throw Error(ErrorCode::NumericalFailure,
                "secular root does not satisfy the norm constraint (|o|^2 = " +
                    std::to_string(o.squaredNorm()) + ")");
  }
  sol.o_hat = UnitVec3::normalized(o);
  sol.cost = (a * sol.o_hat.vec() - rhs).squaredNorm();
  return sol;
}

PositionDesign position_design(const Vec3& p, const AnchorTopology& topology) {
  const auto n = static_cast<Eigen::Index>(topology.size());
  PositionDesign out{DesignMatrix(n, 3), Eigen::VectorXd(n)};
  for (const auto& anchor : topology) {
    const auto i = static_cast<Eigen::Index>(anchor.index);
    const LinkGeometry g = link_geometry(p, anchor);
    out.fields.row(i) = g.scaled_field.transpose();
    out.distances[i] = g.distance;
  }
  return out;
}

ConstrainedLSSolution orientation_given_position(const Vec3& p, const MeasurementVector& y,
                                                 const AnchorTopology& topology, double rho) {
  if (static_cast<std::size_t>(y.size()) != topology.size()) {
    throw Error(ErrorCode::DimensionMismatch, "measurement length does not match topology");
  }
  PositionDesign pd = position_design(p, topology);
  const Eigen::VectorXd amp = rho * pd.distances.array().cube().inverse();
  return solve_constrained({amp.asDiagonal() * pd.fields, y});
}

ConstrainedLSSolution orientation_given_position_scaled(const Vec3& p,
                                                        const Eigen::VectorXd& j_hat,
                                                        const AnchorTopology& topology) {
  if (static_cast<std::size_t>(j_hat.size()) != topology.size()) {
    throw Error(ErrorCode::DimensionMismatch, "scaled observation length does not match topology");
  }
  return solve_constrained({position_design(p, topology).fields, j_hat});
}

Eigen::VectorXd scaled_observations(const Eigen::VectorXd& distances, const MeasurementVector& y,
                                    double rho) {
  return distances.array().cube() * y.array() / rho;
}

}  // namespace nfloc
