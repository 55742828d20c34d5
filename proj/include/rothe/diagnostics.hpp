#pragma once

// Quantities that make the a-priori estimates and the time-interpolant
// constructions observable on a computed Rothe trajectory.

#include <cstdint>
#include <optional>
#include <vector>

#include "rothe/galerkin.hpp"
#include "rothe/stepper.hpp"

namespace rothe {

/// |(3/2a − 2b + c/2, a)_H − ¼(|a|² + |2a−b|² − |b|² − |2b−c|² + |a−2b+c|²)|
double bdf2_identity_gap(const GalerkinSpace& space, const Vector& a, const Vector& b, const Vector& c);

/// (3/2a − 2b + c/2, a − 2b + c)_H − ½|a−b|² + ½|b−c|², which equals
/// ½|a − 2b + c|² and is therefore nonnegative.
double bdf2_inequality_slack(const GalerkinSpace& space, const Vector& a, const Vector& b, const Vector& c);

struct IdentityFuzzReport {
  int triples = 0;
  /// max over triples of gap / scale, scale = max(1, |a|² + |b|² + |c|²)
  double worst_relative_gap = 0.0;
  double worst_slack = 0.0;  // min over triples of bdf2_inequality_slack
  bool ok(double tol = 1e-12) const { return worst_relative_gap <= tol && worst_slack >= -tol; }
};

/// Random standard-normal triples with dimensions 1..16 under random SPD
/// H-Grams (BᵀB + 0.1 I with Gaussian B).
IdentityFuzzReport identity_fuzz(int triples, std::uint64_t seed);

/// Piecewise-constant (ū_τ, ξ̄_τ, f̄_τ) and piecewise-linear (u_τ) time
/// reconstructions of a trajectory. Evaluators throw InvalidInput outside
/// [0, T].
class Interpolants {
 public:
  explicit Interpolants(const RotheTrajectory& traj);

  /// ū_τ(0) = u⁰, ū_τ(t) = uⁿ on ((n−1)τ, nτ].
  Vector piecewise_constant(double t) const;
  /// u_τ; the first branch on [0, τ], the n-th on [(n−1)τ, nτ].
  Vector piecewise_linear(double t) const;
  /// u_τ′, constant on each ((n−1)τ, nτ].
  Vector derivative(double t) const;
  Vector xi_bar(double t) const;
  DualVector f_bar(double t) const;

  /// The n-th branch of u_τ evaluated at any t (for one-sided limits).
  Vector linear_branch(int n, double t) const;
  /// Index n with t ∈ ((n−1)τ, nτ]; 1 for t = 0.
  int interval_of(double t) const;

 private:
  const RotheTrajectory* traj_;
};

struct EstimateReport {
  double q3 = 0.0;   // τ Σ_{n=0}^N ‖uⁿ‖²_V
  double q4 = 0.0;   // max_n |uⁿ|_H
  double q5 = 0.0;   // τ Σ_{n=1}^N ‖ξⁿ‖²_{U*}
  double q6 = 0.0;   // τ ‖(u¹ − u⁰)/τ‖²_{V*}
  double q7 = 0.0;   // τ Σ_{n≥2} ‖(3/2uⁿ − 2uⁿ⁻¹ + ½uⁿ⁻²)/τ‖²_{V*}
  double q75 = 0.0;  // Σ_{n≥2} |uⁿ − 2uⁿ⁻¹ + uⁿ⁻²|²_H
  double gap_closed_form = 0.0;
  double gap_quadrature = 0.0;  // ‖u_τ − ū_τ‖²_{L²(0,T;V*)}
  double u1_u0_gap = 0.0;       // |u¹ − u⁰|_H
  double bv_bound = 0.0;        // T τ Σ ‖(uⁱ − uⁱ⁻¹)/τ‖²_{V*}
};

EstimateReport estimate_report(const RotheTrajectory& traj, const GalerkinSpace& space);

/// ‖u_τ(t) − ū_τ(t)‖_{V*} from the branchwise closed forms
/// (u¹−u⁰)(t−τ/2)/τ and Dⁿ(t−(n−½)τ)/τ − ¼(uⁿ − 2uⁿ⁻¹ + uⁿ⁻²).
double interpolant_gap_closed_form(const RotheTrajectory& traj, const GalerkinSpace& space, double t);

/// ‖u_τ′(t) + A ū_τ(t) + ι^T W ξ̄_τ(t) − f̄_τ(t)‖_{V*}
double interpolant_equation_residual(const Problem& problem, const RotheTrajectory& traj, double t);

struct LadderRow {
  int N = 0;
  double tau = 0.0;
  EstimateReport report;
  /// |u^N − u_ref(T)|_H when a reference was supplied
  std::optional<double> error_at_T;
  double max_step_residual = 0.0;
  double max_membership_slack = 0.0;
};

struct LadderStudy {
  Scheme scheme = Scheme::BDF2;
  std::vector<LadderRow> rows;
  /// least-squares slope of log(error) against log(τ)
  std::optional<double> fitted_order;
};

/// One run per entry of steps (each N gives τ = T/N); rows may be computed
/// concurrently up to jobs threads.
LadderStudy tau_ladder_study(const Problem& problem, const std::vector<int>& steps, Scheme scheme,
                             const SolverOptions& opts = {},
                             const std::optional<RotheTrajectory>& reference = std::nullopt, int jobs = 1);

/// Least-squares slope of log y against log x.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// max/min over the values (∞ if min is 0 and max > 0, 1 if all zero).
double spread_ratio(const std::vector<double>& values);
/// max over the values divided by the first value.
double growth_ratio(const std::vector<double>& values);
/// largest v[k+1]/v[k]
double max_successive_ratio(const std::vector<double>& values);

}  // namespace rothe
