#pragma once

#include <cmath>
#include <random>

#include "rothe/fem1d.hpp"
#include "rothe/inclusion_solver.hpp"
#include "rothe/presets.hpp"
#include "rothe/stepper.hpp"

namespace testing {

using namespace rothe;

// dim = 1 step problem with M = m, K = k, trace = [1], W = [w].
inline StepProblem scalar_toy(const ScalarPotential& pot, double b, double tau = 1.0, double c = 1.0,
                              double m = 1.0, double k = 1.0, double w = 1.0) {
  Matrix mm(1, 1), kk(1, 1), tr(1, 1);
  mm(0, 0) = m;
  kk(0, 0) = k;
  tr(0, 0) = 1.0;
  Vector wv(1);
  wv[0] = w;
  Vector rhs(1);
  rhs[0] = b;
  return {make_step_operator(mm, kk, tr, wv, pot, c, tau), rhs};
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * nd(rng);
  return v;
}

inline Matrix random_spd(std::mt19937_64& rng, Eigen::Index n, double shift = 0.1) {
  std::normal_distribution<double> nd;
  Matrix b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = nd(rng);
  Matrix a = b.transpose() * b + shift * Matrix::Identity(n, n);
  return 0.5 * (a + a.transpose());
}

// Heat-flow problem on n_el elements with constant forcing f0 and zero data.
inline Problem heat_problem(const ScalarPotential& pot, int n_el, double f0 = 1.0, double T = 1.0) {
  presets::ForcingChoice f{"constant", {f0}, {0.0}};
  presets::InitialChoice u0{"zero", {}};
  return presets::make_problem(fem1d::Mesh1D(n_el), pot, f, u0, T);
}

// A = 0, j = 0 on a single-element mesh, forcing f(t) = Σ coeffs[i] tⁱ
// spatially constant: the nodal ODE u' = f.
inline Problem pure_ode_problem(std::vector<double> coeffs, double T = 1.0, double u0 = 0.0) {
  const fem1d::Mesh1D mesh(1);
  const fem1d::Assembly a = fem1d::assemble_space(mesh);
  LinearOperatorA zero_op(SymmetricMatrix(Matrix::Zero(2, 2)), 1.0, 1.0, 0.0, 1.0);
  ForcingSource src = [a, coeffs](double t) {
    double f = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) f = f * t + coeffs[i];
    return DualVector(a.space.gram_h().apply(Vector::Constant(2, f)));
  };
  return Problem{a.space, zero_op, BoundaryFunctional(ScalarPotential::zero(), Vector::Ones(1)), src,
                 Vector::Constant(2, u0), T};
}

}  // namespace testing
