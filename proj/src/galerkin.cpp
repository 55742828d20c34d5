#include "rothe/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "rothe/errors.hpp"

namespace rothe {

namespace {

void require_spd(const SymmetricMatrix& m, const char* name) {
  try {
    SpdFactor f(m);
  } catch (const FactorizationError&) {
    throw InvalidInput(std::string(name) + " is not positive definite");
  }
}

void require_dim(const GalerkinSpace& space, Eigen::Index n, const char* op) {
  if (n != space.dim()) throw InvalidInput(std::string(op) + ": dimension mismatch");
}

}  // namespace

GalerkinSpace::GalerkinSpace(Matrix gram_h, Matrix gram_v, Matrix trace, Matrix gram_u)
    : gram_h_(std::move(gram_h)),
      gram_v_(std::move(gram_v)),
      trace_(std::move(trace)),
      gram_u_(std::move(gram_u)) {
  if (gram_h_.size() == 0) throw InvalidInput("GalerkinSpace: dim must be positive");
  if (gram_v_.size() != gram_h_.size()) throw InvalidInput("GalerkinSpace: gram_v dimension mismatch");
  if (trace_.cols() != gram_h_.size()) throw InvalidInput("GalerkinSpace: trace has wrong column count");
  if (gram_u_.rows() != trace_.rows() || gram_u_.cols() != trace_.rows())
    throw InvalidInput("GalerkinSpace: gram_u must be dim_U x dim_U");
  h_factor_ = std::make_shared<const SpdFactor>(gram_h_);
  v_factor_ = std::make_shared<const SpdFactor>(gram_v_);
  if (trace_.rows() > 0) require_spd(SymmetricMatrix(gram_u_), "gram_u");
  trace_selection_ = true;
  for (Eigen::Index r = 0; r < trace_.rows(); ++r)
    if ((trace_.row(r).array() != 0.0).count() != 1) trace_selection_ = false;
}

Vector GalerkinSpace::apply_trace(const Vector& v) const {
  require_dim(*this, v.size(), "apply_trace");
  return trace_ * v;
}

Vector GalerkinSpace::apply_trace_transpose(const Vector& s) const {
  if (s.size() != boundary_dim()) throw InvalidInput("apply_trace_transpose: dimension mismatch");
  return trace_.transpose() * s;
}

bool GalerkinSpace::v_norm_dominates_h_norm() const {
  const Matrix diff = gram_v_.dense() - gram_h_.dense();
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  const double scale = gram_v_.dense().cwiseAbs().maxCoeff();
  return es.eigenvalues().minCoeff() >= -1e-12 * scale;
}

Norms norms(const GalerkinSpace& space, const Vector& v) {
  require_dim(space, v.size(), "norms");
  Norms n;
  n.h_norm = std::sqrt(std::max(0.0, space.gram_h().quadratic(v)));
  n.v_norm = std::sqrt(std::max(0.0, space.gram_v().quadratic(v)));
  if (space.boundary_dim() > 0) {
    const Vector s = space.trace() * v;
    n.u_norm_of_trace = std::sqrt(std::max(0.0, s.dot(space.gram_u() * s)));
  }
  return n;
}

double h_norm(const GalerkinSpace& space, const Vector& v) {
  require_dim(space, v.size(), "h_norm");
  return std::sqrt(std::max(0.0, space.gram_h().quadratic(v)));
}

double v_norm(const GalerkinSpace& space, const Vector& v) {
  require_dim(space, v.size(), "v_norm");
  return std::sqrt(std::max(0.0, space.gram_v().quadratic(v)));
}

double dual_norm(const GalerkinSpace& space, const DualVector& w) {
  require_dim(space, w.size(), "dual_norm");
  return std::sqrt(space.gram_v_factor().inverse_quadratic(w.coeffs));
}

double dual_norm_of_h(const GalerkinSpace& space, const Vector& v) {
  return dual_norm(space, space.embed(v));
}

double trace_operator_norm(const GalerkinSpace& space) {
  if (space.boundary_dim() == 0) return 0.0;
  const Matrix& t = space.trace();
  const Matrix lhs = t.transpose() * space.gram_u() * t;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(lhs, space.gram_v().dense(),
                                                      Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw FactorizationError("trace_operator_norm: eigensolver failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

LinearOperatorA::LinearOperatorA(SymmetricMatrix k, double alpha_, double beta_, double a_, double b_)
    : stiffness(std::move(k)), alpha(alpha_), beta(beta_), a_growth(a_), b_growth(b_) {
  if (!(alpha > 0.0) || !(beta >= 0.0) || !(a_growth >= 0.0) || !(b_growth > 0.0))
    throw InvalidInput("LinearOperatorA: need alpha > 0, beta >= 0, a >= 0, b > 0");
}

DualVector apply_A(const LinearOperatorA& a, const Vector& v) {
  if (v.size() != a.dim()) throw InvalidInput("apply_A: dimension mismatch");
  return DualVector(a.stiffness.apply(v));
}

HypothesisReportA check_hypotheses_A(const GalerkinSpace& space, const LinearOperatorA& a,
                                     const std::vector<Vector>& samples) {
  if (samples.empty()) throw InvalidInput("check_hypotheses_A: empty sample list");
  require_dim(space, a.dim(), "check_hypotheses_A");
  HypothesisReportA rep;
  rep.samples = samples.size();
  rep.growth_worst_slack = std::numeric_limits<double>::infinity();
  rep.coercivity_worst_slack = std::numeric_limits<double>::infinity();
  for (const Vector& v : samples) {
    const Norms n = norms(space, v);
    const DualVector av = apply_A(a, v);
    const double growth_rhs = a.a_growth + a.b_growth * n.v_norm;
    const double growth_slack = growth_rhs - dual_norm(space, av);
    const double pairing = dot(av.coeffs, v);
    const double coerc_rhs = a.alpha * n.v_norm * n.v_norm - a.beta * n.h_norm * n.h_norm;
    const double coerc_slack = pairing - coerc_rhs;
    rep.growth_worst_slack = std::min(rep.growth_worst_slack, growth_slack);
    rep.coercivity_worst_slack = std::min(rep.coercivity_worst_slack, coerc_slack);
    const double scale = 1.0 + n.v_norm * n.v_norm;
    if (growth_slack < -1e-10 * (1.0 + std::abs(growth_rhs))) ++rep.growth_violations;
    if (coerc_slack < -1e-10 * scale) ++rep.coercivity_violations;
  }
  return rep;
}

}  // namespace rothe
