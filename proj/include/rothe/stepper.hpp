#pragma once

// Two-step BDF Rothe scheme: one implicit Euler start step followed by BDF2
// steps, each driven by window-averaged forcing; plus backward-Euler
// baselines, collocated (f(tₙ)) or with single-window averages.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rothe/galerkin.hpp"
#include "rothe/inclusion_solver.hpp"
#include "rothe/potentials.hpp"

namespace rothe {

struct TimeGrid {
  double T_final = 1.0;
  int N = 1;
  double tau = 1.0;

  TimeGrid(double T, int steps);
  double t(int n) const { return n * tau; }
};

/// BackwardEuler takes f(nτ); BackwardEulerAveraged takes (1/τ)∫ f over
/// ((n−1)τ, nτ], which integrates u' = f exactly when A = 0 and j = 0.
enum class Scheme { BDF2, BackwardEuler, BackwardEulerAveraged };
bool is_one_step(Scheme s);
std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

using ForcingSource = std::function<DualVector(double)>;

/// Everything needed to march: triple, A, J, forcing f(t) ∈ V*, u⁰.
struct Problem {
  GalerkinSpace space;
  LinearOperatorA op;
  BoundaryFunctional functional;
  ForcingSource forcing;
  Vector u0;
  double T_final = 1.0;
};

struct RotheTrajectory {
  TimeGrid grid;
  Scheme scheme = Scheme::BDF2;
  std::vector<Vector> u;            // u⁰ .. u^N
  std::vector<Vector> xi;           // ξ¹ .. ξ^N
  std::vector<DualVector> f_avg;    // f¹_τ .. f^N_τ
  std::vector<double> per_step_residuals;  // V*-norm of the step equation
  std::vector<double> membership_slacks;
  std::vector<int> iterations;
};

/// (1/(b-a)) ∫_a^b f, five-point Gauss.
DualVector window_average(const ForcingSource& f, double a, double b);

/// f¹_τ = (1/τ)∫_0^τ f;  f^n_τ = (3/2τ)∫_{(n-1)τ}^{nτ} f − (1/2τ)∫_{(n-2)τ}^{(n-1)τ} f.
DualVector average_forcing(const ForcingSource& f, int n, const TimeGrid& grid);

/// M u¹ + τ K u¹ + τ ι^T W ξ¹ = τ f¹ + M u⁰ (the step operator must carry c = 1).
/// tol in opts is interpreted for the unscaled step equation.
StepSolution initial_step(const std::shared_ptr<const StepOperator>& op, const Vector& u_prev,
                          const DualVector& f1, const Vector& warm_start, const SolverOptions& opts = {});

/// M uⁿ + (2/3)τ K uⁿ + (2/3)τ ι^T W ξⁿ = (2/3)τ fⁿ + M((4/3)uⁿ⁻¹ − (1/3)uⁿ⁻²)
/// (the step operator must carry c = 2/3). Warm start 2uⁿ⁻¹ − uⁿ⁻².
StepSolution bdf2_step(const std::shared_ptr<const StepOperator>& op, const Vector& u_nm1,
                       const Vector& u_nm2, const DualVector& fn, const SolverOptions& opts = {});

/// Throws StepFailure carrying the 1-based step index.
RotheTrajectory run_rothe(const Problem& problem, const TimeGrid& grid, Scheme scheme,
                          const SolverOptions& opts = {});

struct CoercivityReport {
  double tau = 0.0;
  double c1_first = 0.0;   // ⟨T₁v,v⟩ ≥ c1 τ‖v‖² − c2
  double c2_first = 0.0;
  double c1_bdf2 = 0.0;    // ⟨T₂v,v⟩ ≥ c1 (2/3)τ‖v‖² − c2
  double c2_bdf2 = 0.0;
  bool flagged_first = false;
  bool flagged_bdf2 = false;
  bool ok() const { return !flagged_first && !flagged_bdf2; }
};

/// ⟨T v, v⟩ with the Clarke selection minimizing ⟨ξ, ιv⟩_U.
double worst_case_pairing(const GalerkinSpace& space, const LinearOperatorA& a,
                          const BoundaryFunctional& j, double c_tau, const Vector& v);

CoercivityReport check_step_coercivity(const GalerkinSpace& space, const LinearOperatorA& a,
                                       const BoundaryFunctional& j, double tau,
                                       const std::vector<Vector>& samples);

/// Independent check of the assembled step equations:
/// ‖D uⁿ/τ + A uⁿ + ι^T W ξⁿ − fⁿ‖_{V*} for every n, with D the scheme's
/// difference operator.
std::vector<double> step_equation_residuals(const Problem& problem, const RotheTrajectory& traj);

}  // namespace rothe
