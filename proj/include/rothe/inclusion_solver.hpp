#pragma once

// Per-step inclusion  M u + cτ K u + cτ ι^T W ζ  ∋ b,  ζ_i ∈ ∂j((ι u)_i).
//
// The set-valued term is replaced by the ramp surrogate of
// ScalarPotential::regularized and solved by damped Newton while the ramp
// width is driven from eps0 to eps_min. A final active-set pass pins
// boundary nodes that sit on a kink and recovers their multiplier, so the
// returned ξ satisfies the unregularized inclusion.

#include <memory>
#include <vector>

#include "rothe/galerkin.hpp"
#include "rothe/potentials.hpp"

namespace rothe {

struct SolverOptions {
  double tol = 1e-10;
  double tol_membership = 1e-10;
  double eps0 = 1e-2;
  double eps_min = 1e-10;
  double eps_factor = 0.25;
  int max_iter = 100;
  double armijo_slope = 1e-4;
  int max_backtracks = 40;
};

/// The step-independent part of a step problem. Shared by every step of a
/// run with the same (c, τ).
struct StepOperator {
  SymmetricMatrix mass;
  SymmetricMatrix stiffness;
  SymmetricMatrix system;  // mass + cτ stiffness
  Matrix trace;
  Vector weights;
  ScalarPotential potential;
  double c_coef = 1.0;
  double tau = 1.0;
  std::shared_ptr<const SpdFactor> metric;  // V-Gram factor for dual norms
  bool trace_selection = false;

  double scale() const { return c_coef * tau; }
  Eigen::Index dim() const { return mass.size(); }
  Eigen::Index boundary_dim() const { return trace.rows(); }
};

/// Build from raw matrices. When metric is empty, mass + stiffness is used.
std::shared_ptr<const StepOperator> make_step_operator(Matrix mass, Matrix stiffness, Matrix trace,
                                                       Vector weights, ScalarPotential potential,
                                                       double c_coef, double tau,
                                                       std::optional<Matrix> metric = std::nullopt);

std::shared_ptr<const StepOperator> make_step_operator(const GalerkinSpace& space,
                                                       const LinearOperatorA& a,
                                                       const BoundaryFunctional& j, double c_coef,
                                                       double tau);

struct StepProblem {
  std::shared_ptr<const StepOperator> op;
  Vector rhs;
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;
  double regularization_eps_final = 0.0;
  double membership_slack = 0.0;
  double residual = 0.0;
  /// boundary nodes pinned to a kink by the active-set pass
  int pinned_nodes = 0;
};

struct StepSolution {
  Vector u;
  Vector xi;
  SolveReport report;
};

/// Throws NonConvergence if the final residual or membership slack exceeds
/// its tolerance, NumericalFailure on NaN/Inf.
StepSolution solve_step_inclusion(const StepProblem& p, const Vector& warm_start,
                                  const SolverOptions& opts = {});

/// Root of the equation with ∂j replaced by its eps-ramp surrogate, by
/// damped Newton from warm_start (no continuation, no active-set pass).
/// Throws NonConvergence if the regularized residual does not reach tol.
Vector solve_regularized(const StepProblem& p, const Vector& warm_start, double eps,
                         const SolverOptions& opts = {});

struct InclusionCheck {
  double residual = 0.0;
  bool membership_ok = false;
  double membership_slack = 0.0;
};

/// residual = ‖(M + cτK)u + cτ ι^T W ξ − b‖_{V*}; membership tested within tol.
InclusionCheck verify_inclusion(const StepProblem& p, const Vector& u, const Vector& xi, double tol);

/// (M + cτK)u + cτ ι^T W ξ − b
Vector inclusion_residual(const StepProblem& p, const Vector& u, const Vector& xi);

}  // namespace rothe
