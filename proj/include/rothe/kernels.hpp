#pragma once

// Inner-loop arithmetic kernels. Each kernel has a portable scalar
// reference and, on x86-64, an AVX2/FMA variant. The variant is picked once
// at startup from the CPU feature bits; ROTHE_HVI_SIMD=scalar forces the
// reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace rothe::kernels {

/// Tridiagonal matrix in three-array form: row i holds
/// lower[i-1], diag[i], upper[i]. lower and upper have length n-1.
struct TridiagView {
  std::span<const double> lower;
  std::span<const double> diag;
  std::span<const double> upper;
};

namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void tridiag_matvec(TridiagView a, std::span<const double> x, std::span<double> y);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define ROTHE_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void tridiag_matvec(TridiagView a, std::span<const double> x, std::span<double> y);
}  // namespace avx2
#else
#define ROTHE_HAVE_AVX2_KERNELS 0
#endif

enum class Isa { Scalar, Avx2 };

/// True if the running CPU supports AVX2 and FMA.
bool cpu_has_avx2();

/// Variant used by the dispatching entry points below.
Isa active_isa();
std::string_view isa_name(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void tridiag_matvec(TridiagView a, std::span<const double> x, std::span<double> y);

}  // namespace rothe::kernels
