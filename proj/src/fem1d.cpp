#include "rothe/fem1d.hpp"

#include <array>
#include <cmath>

#include "rothe/errors.hpp"

namespace rothe::fem1d {

namespace {

// Gauss-Legendre on [0,1]
constexpr std::array<double, 3> kGaussX = {0.5 - 0.3872983346207416885, 0.5, 0.5 + 0.3872983346207416885};
constexpr std::array<double, 3> kGaussW = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

template <class F>
Vector load_vector(const Mesh1D& mesh, F&& f) {
  Vector b = Vector::Zero(mesh.nodes());
  const double h = mesh.h();
  for (int e = 0; e < mesh.n_el; ++e) {
    const double x0 = mesh.node(e);
    for (std::size_t q = 0; q < kGaussX.size(); ++q) {
      const double xi = kGaussX[q];
      const double fx = f(x0 + xi * h) * kGaussW[q] * h;
      b[e] += fx * (1.0 - xi);
      b[e + 1] += fx * xi;
    }
  }
  return b;
}

}  // namespace

Mesh1D::Mesh1D(int n) : n_el(n) {
  if (n < 1) throw InvalidInput("Mesh1D: n_el must be at least 1");
}

Assembly assemble_space(const Mesh1D& mesh) {
  const int n = mesh.nodes();
  const double h = mesh.h();
  Matrix mass = Matrix::Zero(n, n);
  Matrix stiff = Matrix::Zero(n, n);
  for (int e = 0; e < mesh.n_el; ++e) {
    mass(e, e) += h / 3.0;
    mass(e + 1, e + 1) += h / 3.0;
    mass(e, e + 1) += h / 6.0;
    mass(e + 1, e) += h / 6.0;
    stiff(e, e) += 1.0 / h;
    stiff(e + 1, e + 1) += 1.0 / h;
    stiff(e, e + 1) -= 1.0 / h;
    stiff(e + 1, e) -= 1.0 / h;
  }
  Matrix trace = Matrix::Zero(1, n);
  trace(0, n - 1) = 1.0;
  Matrix gram_u = Matrix::Identity(1, 1);
  Matrix gram_v = mass + stiff;
  return {GalerkinSpace(std::move(mass), std::move(gram_v), std::move(trace), std::move(gram_u)),
          LinearOperatorA(SymmetricMatrix(std::move(stiff)), 1.0, 1.0, 0.0, 1.0)};
}

DualVector assemble_forcing(const Mesh1D& mesh, const ForcingSpec& spec, double t) {
  Vector b = spec.f0 ? load_vector(mesh, [&](double x) { return spec.f0(t, x); })
                     : Vector::Zero(mesh.nodes());
  if (spec.fN) b[0] += spec.fN(t);
  if (!b.allFinite()) throw NumericalFailure("assemble_forcing: non-finite load");
  return DualVector(std::move(b));
}

InitialValue make_initial(const Mesh1D& mesh, const GalerkinSpace& space,
                          const std::function<double(double)>& u0, double tau) {
  if (space.dim() != mesh.nodes()) throw InvalidInput("make_initial: mesh/space mismatch");
  const Vector b = load_vector(mesh, u0);
  return make_initial(space, space.gram_h_factor().solve(b), tau);
}

InitialValue make_initial(const GalerkinSpace& space, const Vector& u0, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("make_initial: tau must be positive");
  if (u0.size() != space.dim()) throw InvalidInput("make_initial: dimension mismatch");
  return {u0, v_norm(space, u0) * std::sqrt(tau)};
}

double evaluate(const Mesh1D& mesh, const Vector& coeffs, double x) {
  if (coeffs.size() != mesh.nodes()) throw InvalidInput("evaluate: dimension mismatch");
  if (x <= 0.0) return coeffs[0];
  if (x >= 1.0) return coeffs[mesh.n_el];
  const double s = x / mesh.h();
  const int e = std::min(static_cast<int>(s), mesh.n_el - 1);
  const double xi = s - e;
  return (1.0 - xi) * coeffs[e] + xi * coeffs[e + 1];
}

}  // namespace rothe::fem1d
