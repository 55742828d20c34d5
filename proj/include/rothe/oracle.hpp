#pragma once

// Brute-force references used to cross-check the Newton path: interval root
// scans for scalar step inclusions, coordinate-wise energy minimization for
// convex potentials, fine-step and closed-form reference trajectories.

#include <vector>

#include "rothe/inclusion_solver.hpp"
#include "rothe/stepper.hpp"

namespace rothe::oracle {

/// Every root of ρ(u) = (m + cτk)u + cτ w t ζ(t u) − b in [lo, hi] for a
/// dim = 1 step problem with one boundary node. ρ is evaluated as an
/// interval at kinks; sign changes are bisected to 1e-10.
std::vector<double> scan_roots_1d(const StepProblem& p, double lo, double hi, int grid_n = 20000);

struct OracleRoot {
  Vector u;
  Vector xi;
};

/// Roots of a step problem of any dimension with a single boundary node,
/// found by eliminating the interior through (M + cτK)^{-1} and scanning the
/// boundary value s ∈ [lo, hi].
std::vector<OracleRoot> scan_roots_single_boundary(const StepProblem& p, double lo, double hi,
                                                   int grid_n = 20000);

/// Minimizer of E(u) = ½uᵀ(M + cτK)u + cτ Σ w_i j((ιu)_i) − bᵀu by
/// golden-section coordinate sweeps. Throws PreconditionError unless the
/// potential is convex.
Vector minimize_energy_convex(const StepProblem& p, double tol = 1e-12, int max_sweeps = 20000);

double step_energy(const StepProblem& p, const Vector& u);

/// BDF2 at τ_fine with solver tolerance 1e-12.
RotheTrajectory reference_solution(const Problem& problem, int fine_steps, Scheme scheme = Scheme::BDF2);

/// Exact solution at time t of M u′ + (K + ι^T W k ι) u = f with f constant
/// in time, for a LinearRobin(k) or Zero potential: generalized
/// eigendecomposition and exponential propagation.
Vector exact_linear_solution(const Problem& problem, const DualVector& f_const, double t);

}  // namespace rothe::oracle
