#include "rothe/presets.hpp"

#include <cmath>

#include "rothe/errors.hpp"

namespace rothe::presets {

namespace {

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

double robin_coefficient(const ScalarPotential& potential) {
  const auto* lr = std::get_if<LinearRobin>(&potential.kind());
  if (lr == nullptr || !(lr->k > 0.0))
    throw InvalidInput("manufactured_robin preset needs a linear_robin potential with k > 0");
  return lr->k;
}

}  // namespace

double manufactured_time_profile(double t) { return 1.0 + 0.5 * std::sin(2.0 * t); }

double manufactured_space_profile(double k, double x) { return 1.0 / k + 0.5 - 0.5 * x * x; }

fem1d::ForcingSpec make_forcing(const ForcingChoice& choice, const ScalarPotential& potential) {
  fem1d::ForcingSpec spec;
  if (choice.preset == "zero") return spec;
  if (choice.preset == "constant") {
    const double c0 = choice.f0_coeffs.empty() ? 0.0 : choice.f0_coeffs.front();
    const double cn = choice.fN_coeffs.empty() ? 0.0 : choice.fN_coeffs.front();
    spec.f0 = [c0](double, double) { return c0; };
    spec.fN = [cn](double) { return cn; };
    return spec;
  }
  if (choice.preset == "polynomial") {
    const auto f0 = choice.f0_coeffs;
    const auto fn = choice.fN_coeffs;
    spec.f0 = [f0](double t, double) { return horner(f0, t); };
    spec.fN = [fn](double t) { return horner(fn, t); };
    return spec;
  }
  if (choice.preset == "manufactured_robin") {
    // u = g(t) p(x): u_t − u_xx = g′ p + g, u_x(0) = 0, −u_x(1) = k u(1)
    const double k = robin_coefficient(potential);
    spec.f0 = [k](double t, double x) {
      return std::cos(2.0 * t) * manufactured_space_profile(k, x) + manufactured_time_profile(t);
    };
    spec.fN = [](double) { return 0.0; };
    return spec;
  }
  throw InvalidInput("unknown forcing preset '" + choice.preset + "'");
}

std::function<double(double)> make_initial_function(const InitialChoice& choice, const ScalarPotential& potential) {
  if (choice.preset == "zero") return [](double) { return 0.0; };
  if (choice.preset == "constant") {
    const double c = choice.coeffs.empty() ? 0.0 : choice.coeffs.front();
    return [c](double) { return c; };
  }
  if (choice.preset == "polynomial") {
    const auto c = choice.coeffs;
    return [c](double x) { return horner(c, x); };
  }
  if (choice.preset == "manufactured_robin") {
    const double k = robin_coefficient(potential);
    return [k](double x) { return manufactured_time_profile(0.0) * manufactured_space_profile(k, x); };
  }
  throw InvalidInput("unknown initial-value preset '" + choice.preset + "'");
}

Problem make_problem(const fem1d::Mesh1D& mesh, const ScalarPotential& potential, const ForcingChoice& forcing,
                     const InitialChoice& initial, double T_final, const OperatorOverrides& constants) {
  fem1d::Assembly asm_ = fem1d::assemble_space(mesh);
  LinearOperatorA op(asm_.op.stiffness, constants.alpha, constants.beta, constants.a_growth, constants.b_growth);
  Vector weights = Vector::Ones(1);
  const fem1d::ForcingSpec spec = make_forcing(forcing, potential);
  ForcingSource source = [mesh, spec](double t) { return fem1d::assemble_forcing(mesh, spec, t); };
  const fem1d::InitialValue u0 =
      fem1d::make_initial(mesh, asm_.space, make_initial_function(initial, potential), T_final);
  return Problem{asm_.space, std::move(op), BoundaryFunctional(potential, std::move(weights)), std::move(source),
                 u0.coeffs, T_final};
}

}  // namespace rothe::presets
