#pragma once

// Finite-dimensional evolution triple V ⊂ H ⊂ V*: coefficient vectors for V
// and H, assembled load vectors (action on the basis) for V*, and a trace
// map into the boundary space U.

#include <memory>
#include <vector>

#include "rothe/linalg.hpp"

namespace rothe {

/// A functional in V* stored by its action on the basis functions.
struct DualVector {
  Vector coeffs;

  DualVector() = default;
  explicit DualVector(Vector c) : coeffs(std::move(c)) {}
  static DualVector zero(Eigen::Index dim) { return DualVector(Vector::Zero(dim)); }
  Eigen::Index size() const { return coeffs.size(); }
};

class GalerkinSpace {
 public:
  GalerkinSpace(Matrix gram_h, Matrix gram_v, Matrix trace, Matrix gram_u);

  Eigen::Index dim() const { return gram_h_.size(); }
  Eigen::Index boundary_dim() const { return trace_.rows(); }
  const SymmetricMatrix& gram_h() const { return gram_h_; }
  const SymmetricMatrix& gram_v() const { return gram_v_; }
  const Matrix& trace() const { return trace_; }
  const Matrix& gram_u() const { return gram_u_; }
  const SpdFactor& gram_h_factor() const { return *h_factor_; }
  const SpdFactor& gram_v_factor() const { return *v_factor_; }
  std::shared_ptr<const SpdFactor> shared_gram_v_factor() const { return v_factor_; }

  /// True if every row of the trace matrix has exactly one nonzero.
  bool trace_is_selection() const { return trace_selection_; }

  Vector apply_trace(const Vector& v) const;
  /// ι^T applied to boundary coefficients (no Gram weighting).
  Vector apply_trace_transpose(const Vector& s) const;

  /// The H-element v seen as a functional: gram_h * v.
  DualVector embed(const Vector& v) const { return DualVector(gram_h_.apply(v)); }

  /// gram_v - gram_h is positive semi-definite (‖v‖_V ≥ |v|_H).
  bool v_norm_dominates_h_norm() const;

 private:
  SymmetricMatrix gram_h_, gram_v_;
  Matrix trace_, gram_u_;
  std::shared_ptr<const SpdFactor> h_factor_, v_factor_;
  bool trace_selection_ = false;
};

struct Norms {
  double h_norm = 0.0;
  double v_norm = 0.0;
  double u_norm_of_trace = 0.0;
};

Norms norms(const GalerkinSpace& space, const Vector& v);
double h_norm(const GalerkinSpace& space, const Vector& v);
double v_norm(const GalerkinSpace& space, const Vector& v);

/// sup_{v≠0} w^T v / ‖v‖_V, evaluated as sqrt(w^T gram_v^{-1} w).
double dual_norm(const GalerkinSpace& space, const DualVector& w);

/// V*-norm of an H-element (the functional gram_h * v).
double dual_norm_of_h(const GalerkinSpace& space, const Vector& v);

/// Norm of ι: V → U, the largest generalized singular value of the trace in
/// the (gram_u, gram_v) geometry. Equal to the norm of ι*: U* → V*.
double trace_operator_norm(const GalerkinSpace& space);

/// Linear A with ⟨Au, v⟩ = u^T stiffness v, plus the constants of its
/// growth and coercivity bounds.
struct LinearOperatorA {
  SymmetricMatrix stiffness;
  double alpha = 1.0;
  double beta = 1.0;
  double a_growth = 0.0;
  double b_growth = 1.0;

  LinearOperatorA(SymmetricMatrix k, double alpha_, double beta_, double a_, double b_);
  Eigen::Index dim() const { return stiffness.size(); }
};

DualVector apply_A(const LinearOperatorA& a, const Vector& v);

struct HypothesisReportA {
  std::size_t samples = 0;
  /// min over samples of a + b‖v‖ - ‖Av‖_{V*}
  double growth_worst_slack = 0.0;
  /// min over samples of ⟨Av,v⟩ - (α‖v‖² - β|v|²)
  double coercivity_worst_slack = 0.0;
  std::size_t growth_violations = 0;
  std::size_t coercivity_violations = 0;

  bool ok() const { return growth_violations == 0 && coercivity_violations == 0; }
};

/// Sampling certificate for the growth and Gårding-type bounds on A.
/// A sample violates a bound when its slack is below -1e-10 (1 + |rhs|).
HypothesisReportA check_hypotheses_A(const GalerkinSpace& space, const LinearOperatorA& a,
                                     const std::vector<Vector>& samples);

}  // namespace rothe
