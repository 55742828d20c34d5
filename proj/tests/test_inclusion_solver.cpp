#include <cmath>
#include <random>

#include "doctest.h"
#include "rothe/errors.hpp"
#include "rothe/fem1d.hpp"
#include "rothe/inclusion_solver.hpp"
#include "rothe/oracle.hpp"
#include "support.hpp"

using namespace rothe;
using testing::scalar_toy;

namespace {
const double kE1 = std::exp(-1.0);

StepProblem heat_step(const ScalarPotential& pot, int n_el, double c, double tau, const Vector& rhs) {
  const auto a = fem1d::assemble_space(fem1d::Mesh1D(n_el));
  const BoundaryFunctional j(pot, Vector::Ones(1));
  return {make_step_operator(a.space, a.op, j, c, tau), rhs};
}
}  // namespace

TEST_CASE("linear case is a single solve") {
  std::mt19937_64 rng(1);
  const auto a = fem1d::assemble_space(fem1d::Mesh1D(10));
  const Vector b = testing::random_vector(rng, 11);
  const StepProblem p = heat_step(ScalarPotential::zero(), 10, 1.0, 0.1, b);
  const StepSolution s = solve_step_inclusion(p, Vector::Zero(11));
  CHECK(s.report.iterations == 1);
  CHECK(s.report.residual <= 1e-12);
  const Matrix sys = a.space.gram_h().dense() + 0.1 * a.op.stiffness.dense();
  CHECK((s.u - sys.ldlt().solve(b)).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("scalar toy with the exponential law") {
  const auto pot = ScalarPotential::paper_exponential(1.0);
  // (1 + 1)·1 + 1·(e⁻¹ + 1) = 3 + e⁻¹
  const StepSolution s = solve_step_inclusion(scalar_toy(pot, 3.0 + kE1), Vector::Zero(1));
  CHECK(s.u[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.xi[0] == doctest::Approx(1.0 + kE1).epsilon(1e-12));

  // b = 4 + e⁻¹ lands at the root of 3u + e^{-u} = 4 + e⁻¹
  const StepProblem p4 = scalar_toy(pot, 4.0 + kE1);
  const StepSolution s4 = solve_step_inclusion(p4, Vector::Zero(1));
  const auto roots = oracle::scan_roots_1d(p4, -10.0, 10.0);
  REQUIRE(roots.size() == 1);
  CHECK(std::abs(s4.u[0] - roots[0]) <= 1e-9);
  CHECK(3.0 * s4.u[0] + std::exp(-s4.u[0]) == doctest::Approx(4.0 + kE1).epsilon(1e-12));

  const StepSolution z = solve_step_inclusion(scalar_toy(pot, 0.0), Vector::Constant(1, -5.0));
  CHECK(z.u[0] == 0.0);
  CHECK(z.xi[0] == doctest::Approx(0.0).epsilon(1e-14));

  // b inside the jump: u = 0 and ξ = b / (cτ w)
  const StepSolution mid = solve_step_inclusion(scalar_toy(pot, 0.3, 0.5), Vector::Constant(1, 2.0));
  CHECK(mid.u[0] == 0.0);
  CHECK(mid.xi[0] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("verify_inclusion round trip and negative control") {
  const auto pot = ScalarPotential::paper_exponential(1.0);
  const StepProblem p = heat_step(pot, 8, 2.0 / 3.0, 0.05, Vector::Constant(9, 0.2));
  const SolverOptions opts;
  const StepSolution s = solve_step_inclusion(p, Vector::Zero(9), opts);
  const InclusionCheck c = verify_inclusion(p, s.u, s.xi, opts.tol_membership);
  CHECK(c.residual <= opts.tol);
  CHECK(c.membership_ok);

  const Interval iv = pot.clarke(s.u[8]);
  Vector bad = s.xi;
  bad[0] = iv.hi + 2 * opts.tol_membership;
  CHECK_FALSE(verify_inclusion(p, s.u, bad, opts.tol_membership).membership_ok);

  const StepProblem toy = scalar_toy(pot, 3.0 + kE1);
  CHECK(verify_inclusion(toy, Vector::Ones(1), Vector::Constant(1, 1.0 + kE1), 1e-12).residual <= 1e-12);
}

TEST_CASE("convex case: the solution minimizes the step energy") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> b_dist(-2.0, 2.0);
  for (const auto& pot : {ScalarPotential::paper_exponential(1.0), ScalarPotential::linear_robin(2.0)}) {
    for (int trial = 0; trial < 20; ++trial) {
      const int n_el = 1 + trial % 6;
      Vector b(n_el + 1);
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = b_dist(rng);
      const StepProblem p = heat_step(pot, n_el, trial % 2 ? 1.0 : 2.0 / 3.0, 0.1, b);
      const Vector u = solve_step_inclusion(p, Vector::Zero(n_el + 1)).u;
      const double e0 = oracle::step_energy(p, u);
      const double delta = 1e-4;
      for (Eigen::Index k = 0; k < u.size(); ++k) {
        Vector up = u, um = u;
        up[k] += delta;
        um[k] -= delta;
        const double ep = oracle::step_energy(p, up), em = oracle::step_energy(p, um);
        CHECK(e0 <= ep + 1e-14);
        CHECK(e0 <= em + 1e-14);
        // the gradient exists away from the kink
        if (std::abs(u[n_el]) > 10 * delta || k != n_el) CHECK(std::abs(ep - em) / (2 * delta) <= 1e-6);
      }
    }
  }
}

TEST_CASE("regularized roots approach the exact root at rate eps") {
  const auto pot = ScalarPotential::paper_exponential(1.0);
  // b inside the jump region so the boundary sits on the kink
  const StepProblem p = heat_step(pot, 4, 1.0, 0.1, Vector::Constant(5, 0.01));
  const Vector exact = solve_step_inclusion(p, Vector::Zero(5)).u;
  double prev = 0.0;
  for (double eps : {1e-2, 2.5e-3, 6.25e-4, 1.5625e-4}) {
    const double err = (solve_regularized(p, exact, eps) - exact).lpNorm<Eigen::Infinity>();
    CHECK(err <= 1.0 * eps);
    if (prev > 0.0) CHECK(err / prev == doctest::Approx(0.25).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("joint scaling of b, M, K, W leaves the solution unchanged") {
  std::mt19937_64 rng(8);
  const auto a = fem1d::assemble_space(fem1d::Mesh1D(5));
  for (const auto& pot : {ScalarPotential::paper_exponential(1.0), ScalarPotential(NonconvexPiecewise{}),
                          ScalarPotential::linear_robin(1.5)}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector b = testing::random_vector(rng, 6);
      auto solve_scaled = [&](double s) {
        const StepProblem p{make_step_operator(s * a.space.gram_h().dense(), s * a.op.stiffness.dense(),
                                               a.space.trace(), Vector::Constant(1, s), pot, 1.0, 0.1),
                            s * b};
        return solve_step_inclusion(p, Vector::Zero(6)).u;
      };
      const Vector u1 = solve_scaled(1.0);
      for (double s : {1e-3, 7.0, 1e3}) CHECK((solve_scaled(s) - u1).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
  }
}

TEST_CASE("residual history settles monotonically at the end of the last level") {
  const auto pot = ScalarPotential(NonconvexPiecewise{});
  const StepProblem p = heat_step(pot, 16, 1.0, 0.05, Vector::Constant(17, 0.3));
  const StepSolution s = solve_step_inclusion(p, Vector::Zero(17));
  const auto& h = s.report.residual_history;
  REQUIRE(h.size() >= 2);
  CHECK(h.back() <= h.front());
  CHECK(s.report.residual <= 1e-10);
}

TEST_CASE("input validation") {
  const auto pot = ScalarPotential::paper_exponential(1.0);
  const StepProblem p = scalar_toy(pot, 1.0);
  SolverOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(solve_step_inclusion(p, Vector::Zero(1), bad), InvalidInput);
  CHECK_THROWS_AS(solve_step_inclusion(p, Vector::Zero(2)), InvalidInput);
  Vector nan_rhs(1);
  nan_rhs[0] = std::nan("");
  CHECK_THROWS_AS(solve_step_inclusion({p.op, nan_rhs}, Vector::Zero(1)), NumericalFailure);
  SolverOptions starve;
  starve.max_iter = 1;
  starve.tol = 1e-300;
  CHECK_THROWS_AS(solve_step_inclusion(scalar_toy(ScalarPotential::linear_robin(1.0), 1.0), Vector::Zero(1), starve),
                  NonConvergence);
  CHECK_THROWS_AS(make_step_operator(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Vector::Ones(1),
                                     pot, 1.0, 0.0),
                  InvalidInput);
}

TEST_CASE("nonmonotone steps: folds and kink roots still reach a true root") {
  // large cτ makes ρ(u) = (m + cτk)u + cτ w t g(t u) − b nonmonotone, so the
  // residual norm has local minima where plain damped Newton stalls
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 150; ++i) {
    const ScalarPotential nc(NonconvexPiecewise{0.5 + unit(rng), unit(rng) - 0.5, 0.5 * unit(rng),
                                                2.0 + 3.0 * unit(rng), 0.2 + 0.6 * unit(rng)});
    Matrix m(1, 1), k(1, 1), tr(1, 1);
    m(0, 0) = 0.3 + unit(rng);
    k(0, 0) = unit(rng);
    tr(0, 0) = 0.5 + unit(rng);
    const StepProblem p{make_step_operator(m, k, tr, Vector::Constant(1, 1.0 + unit(rng)), nc, 1.0,
                                           0.2 + 0.8 * unit(rng)),
                        Vector::Constant(1, 4.0 * unit(rng) - 1.0)};
    const StepSolution s = solve_step_inclusion(p, Vector::Zero(1));
    const InclusionCheck chk = verify_inclusion(p, s.u, s.xi, 1e-10);
    CHECK(chk.residual <= 1e-10);
    CHECK(chk.membership_ok);
    double best = INFINITY;
    for (double r : oracle::scan_roots_1d(p, -10, 10, 100000)) best = std::min(best, std::abs(r - s.u[0]));
    CHECK(best <= 1e-7);
  }
}
