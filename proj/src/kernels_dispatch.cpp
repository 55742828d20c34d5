#include "rothe/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace rothe::kernels {

namespace {

struct Table {
  Isa isa;
  double (*dot)(std::span<const double>, std::span<const double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  void (*tridiag_matvec)(TridiagView, std::span<const double>, std::span<double>);
};

Table select() {
  const char* forced = std::getenv("ROTHE_HVI_SIMD");
  const bool want_scalar = forced != nullptr && std::strcmp(forced, "scalar") == 0;
#if ROTHE_HAVE_AVX2_KERNELS
  if (!want_scalar && cpu_has_avx2())
    return {Isa::Avx2, &avx2::dot, &avx2::axpy, &avx2::tridiag_matvec};
#endif
  (void)want_scalar;
  return {Isa::Scalar, &scalar::dot, &scalar::axpy, &scalar::tridiag_matvec};
}

const Table& table() {
  static const Table t = select();
  return t;
}

}  // namespace

bool cpu_has_avx2() {
#if ROTHE_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return table().isa; }

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double dot(std::span<const double> x, std::span<const double> y) { return table().dot(x, y); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  table().axpy(alpha, x, y);
}

void tridiag_matvec(TridiagView a, std::span<const double> x, std::span<double> y) {
  table().tridiag_matvec(a, x, y);
}

}  // namespace rothe::kernels
