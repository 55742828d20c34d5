#pragma once

// Named forcing and initial-value presets for the 1-D heat-flow example,
// and the builder that turns them into a Problem.

#include <string>
#include <vector>

#include "rothe/fem1d.hpp"
#include "rothe/stepper.hpp"

namespace rothe::presets {

struct ForcingChoice {
  /// zero | constant | polynomial | manufactured_robin
  std::string preset = "zero";
  /// f0(t, x) = Σ_i f0_coeffs[i] tⁱ (constant preset: f0_coeffs[0])
  std::vector<double> f0_coeffs;
  /// f_N(t) = Σ_i fN_coeffs[i] tⁱ
  std::vector<double> fN_coeffs;
};

struct InitialChoice {
  /// zero | constant | polynomial | manufactured_robin
  std::string preset = "zero";
  /// u0(x) = Σ_i coeffs[i] xⁱ (constant preset: coeffs[0])
  std::vector<double> coeffs;
};

/// Time profile of the manufactured Robin solution g(t) p(x) with
/// p(x) = 1/k + 1/2 − x²/2, g(t) = 1 + sin(2t)/2.
double manufactured_time_profile(double t);
double manufactured_space_profile(double k, double x);

fem1d::ForcingSpec make_forcing(const ForcingChoice& choice, const ScalarPotential& potential);
std::function<double(double)> make_initial_function(const InitialChoice& choice, const ScalarPotential& potential);

struct OperatorOverrides {
  double alpha = 1.0;
  double beta = 1.0;
  double a_growth = 0.0;
  double b_growth = 1.0;
};

/// Assemble the P1 problem; τ is only used for the reported ‖u⁰‖_V √τ.
Problem make_problem(const fem1d::Mesh1D& mesh, const ScalarPotential& potential, const ForcingChoice& forcing,
                     const InitialChoice& initial, double T_final, const OperatorOverrides& constants = {});

}  // namespace rothe::presets
