#include <cmath>
#include <random>

#include "doctest.h"
#include "rothe/errors.hpp"
#include "rothe/fem1d.hpp"
#include "rothe/galerkin.hpp"
#include "support.hpp"

using namespace rothe;

namespace {
GalerkinSpace scalar_space(double h, double v) {
  return GalerkinSpace(Matrix::Constant(1, 1, h), Matrix::Constant(1, 1, v), Matrix::Ones(1, 1),
                       Matrix::Ones(1, 1));
}
}  // namespace

TEST_CASE("norms on hand examples") {
  const auto s = scalar_space(1.0, 2.0);
  const Norms n = norms(s, Vector::Ones(1));
  CHECK(n.h_norm == doctest::Approx(1.0));
  CHECK(n.v_norm == doctest::Approx(std::sqrt(2.0)));
  const Norms z = norms(s, Vector::Zero(1));
  CHECK(z.h_norm == 0.0);
  CHECK(z.v_norm == 0.0);
  CHECK(z.u_norm_of_trace == 0.0);

  const auto a = fem1d::assemble_space(fem1d::Mesh1D(1));
  const Norms c = norms(a.space, Vector::Ones(2));
  CHECK(c.h_norm == doctest::Approx(1.0));
  CHECK(c.v_norm == doctest::Approx(1.0));
  CHECK_THROWS_AS(norms(a.space, Vector::Ones(3)), InvalidInput);
}

TEST_CASE("dual norm on hand examples") {
  CHECK(dual_norm(scalar_space(1.0, 1.0), DualVector(Vector::Constant(1, 3.0))) == doctest::Approx(3.0));
  CHECK(dual_norm(scalar_space(1.0, 4.0), DualVector(Vector::Constant(1, 2.0))) == doctest::Approx(1.0));
}

TEST_CASE("apply_A on the one-element stiffness") {
  const auto a = fem1d::assemble_space(fem1d::Mesh1D(1));
  const DualVector w = apply_A(a.op, Vector::Unit(2, 0));
  CHECK(w.coeffs[0] == doctest::Approx(1.0));
  CHECK(w.coeffs[1] == doctest::Approx(-1.0));
  CHECK(apply_A(a.op, Vector::Constant(2, 3.5)).coeffs.norm() <= 1e-14);
  CHECK(apply_A(a.op, Vector::Zero(2)).coeffs.norm() == 0.0);
}

TEST_CASE("operator constants are validated") {
  const SymmetricMatrix k(Matrix::Identity(2, 2));
  CHECK_THROWS_AS(LinearOperatorA(k, 0.0, 1.0, 0.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(LinearOperatorA(k, 1.0, -1.0, 0.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(LinearOperatorA(k, 1.0, 1.0, -1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(LinearOperatorA(k, 1.0, 1.0, 0.0, 0.0), InvalidInput);
}

TEST_CASE("hypotheses on A: heat operator passes, alpha = 10 fails") {
  std::mt19937_64 rng(11);
  const auto a = fem1d::assemble_space(fem1d::Mesh1D(16));
  std::vector<Vector> samples;
  for (int i = 0; i < 500; ++i) samples.push_back(testing::random_vector(rng, 17, std::pow(10.0, i % 5 - 2)));
  samples.push_back(Vector::Zero(17));
  const HypothesisReportA ok = check_hypotheses_A(a.space, a.op, samples);
  CHECK(ok.ok());

  const HypothesisReportA zero = check_hypotheses_A(a.space, a.op, {Vector::Zero(17)});
  CHECK(zero.ok());
  CHECK(zero.coercivity_worst_slack == 0.0);
  CHECK(zero.growth_worst_slack == 0.0);

  const auto one = fem1d::assemble_space(fem1d::Mesh1D(1));
  const LinearOperatorA bad(one.op.stiffness, 10.0, 1.0, 0.0, 1.0);
  const HypothesisReportA r = check_hypotheses_A(one.space, bad, {Vector::Ones(2)});
  CHECK(r.coercivity_violations == 1);
  CHECK(r.coercivity_worst_slack == doctest::Approx(-9.0));
}

TEST_CASE("Riesz round trip and Cauchy-Schwarz on random spaces") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 12;
    const Matrix gh = testing::random_spd(rng, n);
    const Matrix gv = gh + testing::random_spd(rng, n, 0.0);
    Matrix tr = Matrix::Zero(1, n);
    tr(0, n - 1) = 1.0;
    const GalerkinSpace s(gh, gv, tr, Matrix::Identity(1, 1));
    const Vector v = testing::random_vector(rng, n), w = testing::random_vector(rng, n);
    CHECK(dual_norm(s, DualVector(gv * v)) == doctest::Approx(v_norm(s, v)).epsilon(1e-10));
    CHECK(std::abs(w.dot(v)) <= dual_norm(s, DualVector(w)) * v_norm(s, v) * (1.0 + 1e-12));
    CHECK(s.v_norm_dominates_h_norm());
  }
}

TEST_CASE("heat-flow V-norm is the H-norm plus the Dirichlet energy") {
  std::mt19937_64 rng(9);
  for (int n_el : {1, 4, 33}) {
    const auto a = fem1d::assemble_space(fem1d::Mesh1D(n_el));
    for (int i = 0; i < 20; ++i) {
      const Vector v = testing::random_vector(rng, n_el + 1);
      const double lhs = std::pow(v_norm(a.space, v), 2);
      const double rhs = std::pow(h_norm(a.space, v), 2) + a.op.stiffness.quadratic(v);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
    }
  }
}

TEST_CASE("trace constant is bounded and settles under refinement") {
  // continuum value: sup |v(1)|² / ‖v‖²_{H¹(0,1)} = coth 1. Doubling the mesh
  // nests the P1 spaces, so the discrete constant climbs toward it.
  const double limit = std::sqrt(1.0 / std::tanh(1.0));
  double prev = 0.0;
  for (int n_el : {2, 4, 8, 16, 32, 64, 128}) {
    const auto a = fem1d::assemble_space(fem1d::Mesh1D(n_el));
    const double c = trace_operator_norm(a.space);
    CHECK(c >= prev * (1.0 - 1e-12));
    CHECK(c <= limit * (1.0 + 1e-12));
    prev = c;
  }
  CHECK(prev == doctest::Approx(limit).epsilon(1e-4));
}

TEST_CASE("Gram validation") {
  Matrix bad(2, 2);
  bad << 1, 0, 0, -1;
  CHECK_THROWS(GalerkinSpace(bad, Matrix::Identity(2, 2), Matrix::Ones(1, 2), Matrix::Ones(1, 1)));
  CHECK_THROWS_AS(GalerkinSpace(Matrix::Identity(2, 2), Matrix::Identity(3, 3), Matrix::Ones(1, 2),
                                Matrix::Ones(1, 1)),
                  InvalidInput);
}
