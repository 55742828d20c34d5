#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rothe/kernels.hpp"

namespace k = rothe::kernels;

namespace {
std::vector<double> uniform_data(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}
}  // namespace

TEST_CASE("scalar kernels on hand data") {
  const std::vector<double> x{1, 2, 3}, y{4, -5, 6};
  CHECK(k::scalar::dot(x, y) == 12.0);
  std::vector<double> z = y;
  k::scalar::axpy(2.0, x, z);
  CHECK(z == std::vector<double>{6, -1, 12});
  // [[2,-1,0],[-1,2,-1],[0,-1,2]] * [1,2,3]
  const std::vector<double> lo{-1, -1}, di{2, 2, 2}, up{-1, -1};
  std::vector<double> out(3);
  k::scalar::tridiag_matvec({lo, di, up}, x, out);
  CHECK(out == std::vector<double>{0, 0, 4});
}

TEST_CASE("single-row tridiagonal and empty vectors") {
  const std::vector<double> none, di{3.0}, x{2.0};
  std::vector<double> out(1);
  k::tridiag_matvec({none, di, none}, x, out);
  CHECK(out[0] == 6.0);
  CHECK(k::dot(none, none) == 0.0);
}

#if ROTHE_HAVE_AVX2_KERNELS
TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!k::cpu_has_avx2()) {
    MESSAGE("CPU lacks AVX2/FMA; equivalence test skipped");
    return;
  }
  std::mt19937_64 rng(7);
  for (std::size_t n = 0; n < 70; ++n) {
    CAPTURE(n);
    const auto x = uniform_data(rng, n), y = uniform_data(rng, n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
    CHECK(std::abs(k::avx2::dot(x, y) - k::scalar::dot(x, y)) <= 1e-15 * (1.0 + mag) * 4);

    auto ya = y, ys = y;
    k::avx2::axpy(0.37, x, ya);
    k::scalar::axpy(0.37, x, ys);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ya[i] - ys[i]) <= 2.3e-16 * 4);

    if (n == 0) continue;
    const auto lo = uniform_data(rng, n - 1), di = uniform_data(rng, n), up = uniform_data(rng, n - 1);
    std::vector<double> oa(n), os(n);
    k::avx2::tridiag_matvec({lo, di, up}, x, oa);
    k::scalar::tridiag_matvec({lo, di, up}, x, os);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(oa[i] - os[i]) <= 1e-15 * 8);
  }
}
#endif

TEST_CASE("dispatch reports a consistent variant") {
  const auto isa = k::active_isa();
  CHECK(!k::isa_name(isa).empty());
  if (isa == k::Isa::Avx2) CHECK(k::cpu_has_avx2());
}
