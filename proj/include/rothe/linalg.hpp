#pragma once

// Dense/tridiagonal matrix wrappers used by the Galerkin layer. Dense
// storage is always kept; a tridiagonal copy is attached whenever the matrix
// has bandwidth one, and the fast paths use it.

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "rothe/kernels.hpp"

namespace rothe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Tridiagonal {
 public:
  Tridiagonal() = default;
  Tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper);

  /// Band extraction; empty if any entry outside the band is nonzero.
  static std::optional<Tridiagonal> from_dense(const Matrix& a);

  Eigen::Index size() const { return static_cast<Eigen::Index>(diag_.size()); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& diag() const { return diag_; }
  const std::vector<double>& upper() const { return upper_; }
  kernels::TridiagView view() const { return {lower_, diag_, upper_}; }

  Vector apply(const Vector& x) const;
  Matrix to_dense() const;

  /// this + scale * other
  Tridiagonal axpby(double scale, const Tridiagonal& other) const;
  void add_to_diagonal(Eigen::Index i, double value) { diag_[static_cast<std::size_t>(i)] += value; }

  /// Gaussian elimination without pivoting. Throws FactorizationError when a
  /// pivot falls below 1e-14 of the row scale.
  Vector solve(const Vector& rhs) const;

 private:
  std::vector<double> lower_, diag_, upper_;
};

/// Symmetric matrix; symmetry is checked to 1e-12 relative on construction.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Matrix dense);

  Eigen::Index size() const { return dense_.rows(); }
  const Matrix& dense() const { return dense_; }
  const std::optional<Tridiagonal>& band() const { return band_; }

  Vector apply(const Vector& x) const;
  double quadratic(const Vector& x) const;
  double bilinear(const Vector& x, const Vector& y) const;

  /// a*this + b*other
  SymmetricMatrix combine(double a, const SymmetricMatrix& other, double b) const;

 private:
  Matrix dense_;
  std::optional<Tridiagonal> band_;
};

/// Cholesky (tridiagonal LDL^T on the band path). Never forms an inverse.
class SpdFactor {
 public:
  explicit SpdFactor(const SymmetricMatrix& a);

  Vector solve(const Vector& rhs) const;
  /// w^T A^{-1} w
  double inverse_quadratic(const Vector& w) const;
  Eigen::Index size() const { return n_; }

 private:
  Eigen::Index n_ = 0;
  std::optional<Eigen::LLT<Matrix>> dense_;
  // band path: unit-lower bidiagonal L (sub) and diagonal D
  std::vector<double> ldl_sub_, ldl_diag_;
};

/// Solve a general square system, using the band when present and stable,
/// otherwise dense partial-pivot LU.
Vector solve_general(const Matrix& dense, const std::optional<Tridiagonal>& band, const Vector& rhs);

double dot(const Vector& x, const Vector& y);

}  // namespace rothe
