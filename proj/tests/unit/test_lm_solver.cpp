#include "doctest.h"

#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "core/error.hpp"
#include "core/lm_solver.hpp"
#include "core/rng.hpp"

using namespace nfloc;

namespace {

ResidualProblem rosenbrock(bool analytic) {
  ResidualProblem p;
  p.parameters = 2;
  p.residuals = 2;
  p.residual = [](const VectorXd& x) {
    VectorXd r(2);
    r << 10 * (x[1] - x[0] * x[0]), 1 - x[0];
    return r;
  };
  if (analytic) {
    p.jacobian = [](const VectorXd& x) {
      MatrixXd j(2, 2);
      j << -20 * x[0], 10, -1, 0;
      return j;
    };
  }
  return p;
}

}  // namespace

TEST_CASE("linear residual converges within a few iterations") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    VectorXd a(4);
    for (int i = 0; i < 4; ++i) a[i] = uniform(rng, -10, 10);
    ResidualProblem p;
    p.parameters = 4;
    p.residuals = 4;
    p.residual = [a](const VectorXd& x) { return VectorXd(x - a); };
    p.jacobian = [](const VectorXd&) { return MatrixXd(MatrixXd::Identity(4, 4)); };
    VectorXd x0(4);
    for (int i = 0; i < 4; ++i) x0[i] = uniform(rng, -10, 10);
    // Each accepted step removes all but lambda / (1 + lambda) of the error.
    const SolverResult r = solve(p, x0);
    CHECK(r.iterations <= 3);
    CHECK(r.termination == Termination::StepTolerance);
    CHECK((r.argmin - a).norm() < 2e-6 * (1 + a.norm()));
    SolverOptions tight;
    tight.min_step = 1e-13;
    tight.gradient_tolerance = 0;
    const SolverResult sharp = solve(p, x0, tight);
    CHECK(sharp.iterations <= 5);
    CHECK((sharp.argmin - a).norm() < 1e-11);
  }
}

TEST_CASE("Rosenbrock") {
  SolverOptions opts;
  opts.min_step = 1e-12;
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  for (bool analytic : {true, false}) {
    const SolverResult r = solve(rosenbrock(analytic), x0, opts);
    CHECK(std::abs(r.argmin[0] - 1.0) < 1e-8);
    CHECK(std::abs(r.argmin[1] - 1.0) < 1e-8);
    CHECK(r.termination != Termination::MaxIterations);
  }
  const SolverResult a = solve(rosenbrock(true), x0);
  const SolverResult f = solve(rosenbrock(false), x0);
  CHECK((a.argmin - f.argmin).norm() < 1e-6);
}

TEST_CASE("random linear least squares matches the normal equations") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const int m = 8, k = 3;
    MatrixXd a(m, k);
    VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      b[i] = standard_normal(rng);
      for (int j = 0; j < k; ++j) a(i, j) = standard_normal(rng);
    }
    ResidualProblem p;
    p.parameters = k;
    p.residuals = m;
    p.residual = [&](const VectorXd& x) { return VectorXd(a * x - b); };
    p.jacobian = [&](const VectorXd&) { return a; };
    const VectorXd expected = (a.transpose() * a).ldlt().solve(a.transpose() * b);
    SolverOptions opts;
    opts.min_step = 1e-14;
    opts.gradient_tolerance = 0;
    const SolverResult r = solve(p, VectorXd::Zero(k), opts);
    // Acceptance compares costs, which resolve x only to about sqrt(eps).
    CHECK((r.argmin - expected).norm() <= 1e-7 * std::max(1.0, expected.norm()));
    CHECK(r.termination != Termination::MaxIterations);

    // Finite-difference Jacobian reaches the same point.
    ResidualProblem pf = p;
    pf.jacobian = nullptr;
    CHECK((solve(pf, VectorXd::Zero(k), opts).argmin - expected).norm() < 1e-6);
  }
}

TEST_CASE("accepted costs are monotone and iterations count accepted updates") {
  auto base = rosenbrock(true);
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  std::vector<double> evaluated;
  ResidualProblem p = base;
  p.residual = [&](const VectorXd& x) {
    VectorXd r = base.residual(x);
    evaluated.push_back(r.squaredNorm());
    return r;
  };
  const SolverResult r = solve(p, x0);
  // Replay: the accepted sequence is each evaluation lower than all before it.
  double best = evaluated.front();
  int accepted = 0;
  for (std::size_t i = 1; i < evaluated.size(); ++i) {
    if (evaluated[i] < best) {
      best = evaluated[i];
      ++accepted;
    }
  }
  CHECK(accepted == r.iterations);
  CHECK(r.cost == best);
  CHECK(r.cost <= evaluated.front());
}

TEST_CASE("iteration cap") {
  SolverOptions opts;
  opts.max_iterations = 3;
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  const SolverResult r = solve(rosenbrock(true), x0, opts);
  CHECK(r.iterations == 3);
  CHECK(r.termination == Termination::MaxIterations);
}

TEST_CASE("non-finite residual keeps the last good iterate") {
  ResidualProblem p;
  p.parameters = 1;
  p.residuals = 1;
  // Valid for x < 2; the first Gauss-Newton step from 0 lands at 3.
  p.residual = [](const VectorXd& x) {
    VectorXd r(1);
    r[0] = x[0] < 2 ? x[0] - 3 : std::numeric_limits<double>::quiet_NaN();
    return r;
  };
  p.jacobian = [](const VectorXd&) { return MatrixXd::Ones(1, 1); };
  SolverOptions opts;
  opts.initial_damping = 1e-12;
  const SolverResult r = solve(p, VectorXd::Zero(1), opts);
  CHECK(r.termination == Termination::NumericalFailure);
  CHECK(r.argmin[0] == 0.0);
  CHECK(r.cost == doctest::Approx(9.0));

  const SolverResult bad = solve(p, VectorXd::Constant(1, 5.0), opts);
  CHECK(bad.termination == Termination::NumericalFailure);
}

TEST_CASE("invalid problems") {
  ResidualProblem p;
  p.parameters = 3;
  p.residuals = 2;
  p.residual = [](const VectorXd& x) { return VectorXd(x.head(2)); };
  CHECK_THROWS_AS(solve(p, VectorXd::Zero(3)), Error);
  p.residuals = 3;
  CHECK_THROWS_AS(solve(p, VectorXd::Zero(2)), Error);
  VectorXd inf = VectorXd::Zero(3);
  inf[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(solve(p, inf), Error);
}

TEST_CASE("tiny damping never stalls the retry loop") {
  // A flat valley that accepts thousands of shrinking steps drives the
  // damping towards underflow.
  ResidualProblem p;
  p.parameters = 1;
  p.residuals = 2;
  p.residual = [](const VectorXd& x) {
    VectorXd r(2);
    r << std::exp(-x[0]), 1e-3 * std::sin(x[0]);
    return r;
  };
  SolverOptions opts;
  opts.max_iterations = 5000;
  opts.min_step = 1e-300;
  opts.gradient_tolerance = 0.0;
  const SolverResult r = solve(p, VectorXd::Zero(1), opts);
  CHECK(r.iterations <= opts.max_iterations);
}
