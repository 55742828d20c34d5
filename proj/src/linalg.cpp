#include "rothe/linalg.hpp"

#include <cmath>
#include <sstream>

#include "rothe/errors.hpp"

namespace rothe {

namespace {
std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
}  // namespace

double dot(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw InvalidInput("dot: dimension mismatch");
  return kernels::dot(as_span(x), as_span(y));
}

Tridiagonal::Tridiagonal(std::vector<double> lower, std::vector<double> diag,
                         std::vector<double> upper)
    : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {
  const std::size_t n = diag_.size();
  const std::size_t off = n == 0 ? 0 : n - 1;
  if (lower_.size() != off || upper_.size() != off)
    throw InvalidInput("Tridiagonal: off-diagonal length must be n-1");
}

std::optional<Tridiagonal> Tridiagonal::from_dense(const Matrix& a) {
  if (a.rows() != a.cols()) return std::nullopt;
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(i - j) > 1 && a(i, j) != 0.0) return std::nullopt;
  std::vector<double> lo, d(static_cast<std::size_t>(n)), up;
  for (Eigen::Index i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = a(i, i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    lo.push_back(a(i + 1, i));
    up.push_back(a(i, i + 1));
  }
  return Tridiagonal(std::move(lo), std::move(d), std::move(up));
}

Vector Tridiagonal::apply(const Vector& x) const {
  if (x.size() != size()) throw InvalidInput("Tridiagonal::apply: dimension mismatch");
  Vector y(x.size());
  kernels::tridiag_matvec(view(), as_span(x), {y.data(), static_cast<std::size_t>(y.size())});
  return y;
}

Matrix Tridiagonal::to_dense() const {
  const Eigen::Index n = size();
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = diag_[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    a(i + 1, i) = lower_[static_cast<std::size_t>(i)];
    a(i, i + 1) = upper_[static_cast<std::size_t>(i)];
  }
  return a;
}

Tridiagonal Tridiagonal::axpby(double scale, const Tridiagonal& other) const {
  if (other.size() != size()) throw InvalidInput("Tridiagonal::axpby: dimension mismatch");
  Tridiagonal out = *this;
  for (std::size_t i = 0; i < diag_.size(); ++i) out.diag_[i] += scale * other.diag_[i];
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    out.lower_[i] += scale * other.lower_[i];
    out.upper_[i] += scale * other.upper_[i];
  }
  return out;
}

Vector Tridiagonal::solve(const Vector& rhs) const {
  const std::size_t n = diag_.size();
  if (static_cast<std::size_t>(rhs.size()) != n)
    throw InvalidInput("Tridiagonal::solve: dimension mismatch");
  std::vector<double> c(n), d(n);
  auto scale_of = [&](std::size_t i) {
    double s = std::abs(diag_[i]);
    if (i > 0) s += std::abs(lower_[i - 1]);
    if (i + 1 < n) s += std::abs(upper_[i]);
    return s;
  };
  double piv = diag_[0];
  if (std::abs(piv) <= 1e-14 * scale_of(0)) throw FactorizationError("tridiagonal: zero pivot at row 0");
  c[0] = n > 1 ? upper_[0] / piv : 0.0;
  d[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag_[i] - lower_[i - 1] * c[i - 1];
    if (std::abs(piv) <= 1e-14 * scale_of(i)) {
      std::ostringstream os;
      os << "tridiagonal: zero pivot at row " << i;
      throw FactorizationError(os.str());
    }
    c[i] = i + 1 < n ? upper_[i] / piv : 0.0;
    d[i] = (rhs[static_cast<Eigen::Index>(i)] - lower_[i - 1] * d[i - 1]) / piv;
  }
  Vector x(static_cast<Eigen::Index>(n));
  x[static_cast<Eigen::Index>(n - 1)] = d[n - 1];
  for (std::size_t k = n - 1; k-- > 0;)
    x[static_cast<Eigen::Index>(k)] = d[k] - c[k] * x[static_cast<Eigen::Index>(k + 1)];
  return x;
}

SymmetricMatrix::SymmetricMatrix(Matrix dense) : dense_(std::move(dense)) {
  if (dense_.rows() != dense_.cols()) throw InvalidInput("SymmetricMatrix: matrix is not square");
  const double scale = dense_.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) throw InvalidInput("SymmetricMatrix: non-finite entry");
  if ((dense_ - dense_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidInput("SymmetricMatrix: matrix is not symmetric to 1e-12 relative");
  band_ = Tridiagonal::from_dense(dense_);
}

Vector SymmetricMatrix::apply(const Vector& x) const {
  if (x.size() != size()) throw InvalidInput("SymmetricMatrix::apply: dimension mismatch");
  if (band_) return band_->apply(x);
  return dense_ * x;
}

double SymmetricMatrix::quadratic(const Vector& x) const { return dot(x, apply(x)); }

double SymmetricMatrix::bilinear(const Vector& x, const Vector& y) const { return dot(x, apply(y)); }

SymmetricMatrix SymmetricMatrix::combine(double a, const SymmetricMatrix& other, double b) const {
  if (other.size() != size()) throw InvalidInput("SymmetricMatrix::combine: dimension mismatch");
  return SymmetricMatrix(a * dense_ + b * other.dense_);
}

SpdFactor::SpdFactor(const SymmetricMatrix& a) : n_(a.size()) {
  if (n_ == 0) throw InvalidInput("SpdFactor: empty matrix");
  if (a.band()) {
    const auto& t = *a.band();
    const std::size_t n = static_cast<std::size_t>(n_);
    ldl_diag_.resize(n);
    ldl_sub_.resize(n > 0 ? n - 1 : 0);
    const double scale = a.dense().cwiseAbs().maxCoeff();
    ldl_diag_[0] = t.diag()[0];
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        ldl_sub_[i - 1] = t.lower()[i - 1] / ldl_diag_[i - 1];
        ldl_diag_[i] = t.diag()[i] - ldl_sub_[i - 1] * t.lower()[i - 1];
      }
      if (!(ldl_diag_[i] > 1e-15 * scale))
        throw FactorizationError("SpdFactor: matrix is not positive definite");
    }
    return;
  }
  dense_.emplace(a.dense());
  if (dense_->info() != Eigen::Success)
    throw FactorizationError("SpdFactor: matrix is not positive definite");
  // LLT accepts some semi-definite inputs; check the factor diagonal
  const Matrix l = dense_->matrixL();
  const double scale = std::sqrt(a.dense().cwiseAbs().maxCoeff());
  if (!(l.diagonal().minCoeff() > 1e-8 * scale))
    throw FactorizationError("SpdFactor: matrix is not positive definite");
}

Vector SpdFactor::solve(const Vector& rhs) const {
  if (rhs.size() != n_) throw InvalidInput("SpdFactor::solve: dimension mismatch");
  if (dense_) return dense_->solve(rhs);
  const std::size_t n = static_cast<std::size_t>(n_);
  Vector y = rhs;
  for (std::size_t i = 1; i < n; ++i) y[static_cast<Eigen::Index>(i)] -= ldl_sub_[i - 1] * y[static_cast<Eigen::Index>(i - 1)];
  for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] /= ldl_diag_[i];
  for (std::size_t k = n - 1; k-- > 0;)
    y[static_cast<Eigen::Index>(k)] -= ldl_sub_[k] * y[static_cast<Eigen::Index>(k + 1)];
  return y;
}

double SpdFactor::inverse_quadratic(const Vector& w) const {
  const double q = dot(w, solve(w));
  return q > 0.0 ? q : 0.0;
}

Vector solve_general(const Matrix& dense, const std::optional<Tridiagonal>& band, const Vector& rhs) {
  if (dense.rows() != rhs.size() || dense.cols() != rhs.size())
    throw InvalidInput("solve_general: dimension mismatch");
  if (band) {
    try {
      Vector x = band->solve(rhs);
      if (x.allFinite()) return x;
    } catch (const FactorizationError&) {
      // fall through to the pivoted dense path
    }
  }
  Eigen::PartialPivLU<Matrix> lu(dense);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-15)) throw FactorizationError("solve_general: matrix is singular");
  return lu.solve(rhs);
}

}  // namespace rothe
