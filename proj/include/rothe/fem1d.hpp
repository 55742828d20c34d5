#pragma once

// P1 finite elements for the heat-flow example on Ω = (0,1): Neumann data
// on Γ_N = {0}, the nonmonotone Clarke condition on Γ_C = {1}.

#include <functional>
#include <utility>

#include "rothe/galerkin.hpp"

namespace rothe::fem1d {

struct Mesh1D {
  int n_el = 1;

  explicit Mesh1D(int n);
  double h() const { return 1.0 / n_el; }
  int nodes() const { return n_el + 1; }
  double node(int i) const { return i * h(); }
};

struct ForcingSpec {
  /// volume source f0(t, x)
  std::function<double(double, double)> f0;
  /// Neumann datum f_N(t) at x = 0
  std::function<double(double)> fN;
};

struct Assembly {
  GalerkinSpace space;
  LinearOperatorA op;
};

/// Mass, stiffness, V-Gram (= mass + stiffness) and the trace at x = 1.
/// A carries (α, β, a, b) = (1, 1, 0, 1).
Assembly assemble_space(const Mesh1D& mesh);

/// ℓ_i = ∫ f0(t,x) φ_i dx + f_N(t) φ_i(0); three-point Gauss per element.
DualVector assemble_forcing(const Mesh1D& mesh, const ForcingSpec& spec, double t);

struct InitialValue {
  Vector coeffs;
  /// ‖u_τ⁰‖_V √τ
  double scaled_v_norm = 0.0;
};

/// L²(Ω)-projection of u0 onto the P1 space.
InitialValue make_initial(const Mesh1D& mesh, const GalerkinSpace& space,
                          const std::function<double(double)>& u0, double tau);
/// Coefficient vectors are already in the space; only the norm is reported.
InitialValue make_initial(const GalerkinSpace& space, const Vector& u0, double tau);

/// Evaluate a P1 coefficient vector at x.
double evaluate(const Mesh1D& mesh, const Vector& coeffs, double x);

}  // namespace rothe::fem1d
