#include <random>

#include "doctest.h"
#include "rothe/errors.hpp"
#include "rothe/linalg.hpp"
#include "support.hpp"

using namespace rothe;

TEST_CASE("tridiagonal round trip and solve") {
  Matrix a(4, 4);
  a << 4, 1, 0, 0,  //
      2, 5, 1, 0,   //
      0, 1, 6, 2,   //
      0, 0, 3, 7;
  const auto t = Tridiagonal::from_dense(a);
  REQUIRE(t.has_value());
  CHECK((t->to_dense() - a).norm() == 0.0);
  const Vector x = Vector::LinSpaced(4, 1.0, 4.0);
  CHECK((t->apply(x) - a * x).norm() <= 1e-14);
  CHECK((t->solve(a * x) - x).norm() <= 1e-13);

  Matrix wide = a;
  wide(0, 3) = 1.0;
  CHECK_FALSE(Tridiagonal::from_dense(wide).has_value());
}

TEST_CASE("symmetric matrix validation") {
  Matrix a(2, 2);
  a << 1, 2, 2.1, 1;
  CHECK_THROWS_AS(SymmetricMatrix{a}, InvalidInput);
  a(1, 0) = 2.0;
  const SymmetricMatrix s(a);
  CHECK(s.quadratic(Vector::Ones(2)) == doctest::Approx(6.0));
}

TEST_CASE("SPD factor agrees with a dense solve on banded and dense inputs") {
  std::mt19937_64 rng(3);
  for (int n : {1, 2, 5, 12}) {
    const Matrix a = testing::random_spd(rng, n);
    const SpdFactor f{SymmetricMatrix(a)};
    const Vector b = testing::random_vector(rng, n);
    CHECK((a * f.solve(b) - b).norm() <= 1e-10 * (1.0 + b.norm()) * a.norm());
    CHECK(f.inverse_quadratic(b) == doctest::Approx(b.dot(a.ldlt().solve(b))).epsilon(1e-10));

    Matrix tri = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      tri(i, i) = 4.0;
      if (i > 0) tri(i, i - 1) = tri(i - 1, i) = -1.0;
    }
    const SpdFactor ft{SymmetricMatrix(tri)};
    CHECK((tri * ft.solve(b) - b).norm() <= 1e-12 * (1.0 + b.norm()));
  }
}

TEST_CASE("indefinite matrices are rejected") {
  Matrix a(2, 2);
  a << 1, 0, 0, -1;
  CHECK_THROWS_AS(SpdFactor{SymmetricMatrix(a)}, FactorizationError);
  Matrix d = Matrix::Identity(3, 3);
  d(2, 2) = 0.0;
  CHECK_THROWS_AS(SpdFactor{SymmetricMatrix(d)}, FactorizationError);
}

TEST_CASE("general solve falls back from the band to LU") {
  Matrix a(3, 3);
  a << 0, 1, 0,  //
      1, 0, 1,   //
      0, 1, 1;
  const Vector b(Vector::Ones(3));
  const Vector x = solve_general(a, Tridiagonal::from_dense(a), b);
  CHECK((a * x - b).norm() <= 1e-12);
}
