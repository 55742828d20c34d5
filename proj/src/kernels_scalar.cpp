#include "rothe/kernels.hpp"

namespace rothe::kernels::scalar {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void tridiag_matvec(TridiagView a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = a.diag.size();
  if (n == 0) return;
  if (n == 1) {
    y[0] = a.diag[0] * x[0];
    return;
  }
  y[0] = a.diag[0] * x[0] + a.upper[0] * x[1];
  for (std::size_t i = 1; i + 1 < n; ++i)
    y[i] = a.lower[i - 1] * x[i - 1] + a.diag[i] * x[i] + a.upper[i] * x[i + 1];
  y[n - 1] = a.lower[n - 2] * x[n - 2] + a.diag[n - 1] * x[n - 1];
}

}  // namespace rothe::kernels::scalar
