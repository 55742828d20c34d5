#pragma once

// Locally Lipschitz scalar potentials j: R -> R and their Clarke
// subdifferentials. In one dimension ∂j(s) is the closed interval spanned by
// the one-sided derivative limits, so a potential is described by a
// piecewise-smooth derivative branch g plus an explicit list of kinks where
// g jumps.

#include <string>
#include <variant>
#include <vector>

#include "rothe/linalg.hpp"

namespace rothe {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
  double distance(double x) const { return x < lo ? lo - x : (x > hi ? x - hi : 0.0); }
  double project(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

/// j(s) = 0 for s < 0 and -d e^{-s} + d s²/2 + d for s >= 0.
struct PaperExponential {
  double d = 1.0;
  /// Use the variant branch d e^{-s} + s instead of the derivative
  /// d e^{-s} + d s. Identical for d = 1.
  bool literal_subdiff = false;
};

/// j(s) = k s²/2, ∂j(s) = {k s}.
struct LinearRobin {
  double k = 1.0;
};

/// C⁰ piecewise quadratic with a nonmonotone derivative:
///   g(s) = slope·s                                   s < kink
///   g(s) = slope·kink + jump - descent·(s - kink)    kink < s < kink + width
///   g(s) = g(kink + width) + slope·(s - kink - width) s > kink + width
/// ∂j(kink) = [slope·kink, slope·kink + jump].
struct NonconvexPiecewise {
  double slope = 1.0;
  double kink = 0.5;
  double jump = 1.0;
  double descent = 4.0;
  double width = 0.5;
};

struct ZeroPotential {};

struct Regularized {
  double value = 0.0;
  double derivative = 0.0;
};

struct Kink {
  double at = 0.0;
  double left = 0.0;   // lim g(s), s -> at-
  double right = 0.0;  // lim g(s), s -> at+
};

class ScalarPotential {
 public:
  using Kind = std::variant<PaperExponential, LinearRobin, NonconvexPiecewise, ZeroPotential>;

  /// d_j defaults to the smallest constant the branch formulas admit.
  explicit ScalarPotential(Kind kind);
  ScalarPotential(Kind kind, double d_j);

  static ScalarPotential paper_exponential(double d, bool literal = false) {
    return ScalarPotential(PaperExponential{d, literal});
  }
  static ScalarPotential linear_robin(double k) { return ScalarPotential(LinearRobin{k}); }
  static ScalarPotential zero() { return ScalarPotential(ZeroPotential{}); }

  const Kind& kind() const { return kind_; }
  double d_j() const { return d_j_; }
  const std::vector<Kink>& kinks() const { return kinks_; }
  std::string name() const;

  double value(double s) const;
  Interval clarke(double s) const;
  /// Hull of ∂j(s) and the interval of every kink within reach of s; a
  /// boundary value computed as a trace product can miss a kink by an ulp.
  Interval clarke_near(double s, double reach) const;

  /// The derivative branch g away from kinks (right limit at a kink).
  double branch(double s) const;
  /// g'(s) a.e.
  double branch_slope(double s) const;

  /// Lipschitz surrogate: exact branch outside the ramp zones, linear ramp
  /// from the left to the right limit across each kink.
  Regularized regularized(double s, double eps) const;

  /// The kink whose ramp zone [at, at+eps] (or [at-eps, at] for a downward
  /// jump) contains s, if any.
  const Kink* ramp_kink(double s, double eps) const;

  /// True for the closed-form monotone kinds (PaperExponential, LinearRobin
  /// with k >= 0, Zero).
  bool convex() const;

 private:
  Kind kind_;
  double d_j_ = 1.0;
  std::vector<Kink> kinks_;
};

inline double potential_value(const ScalarPotential& pot, double s) { return pot.value(s); }
inline Interval clarke_interval(const ScalarPotential& pot, double s) { return pot.clarke(s); }
/// Throws InvalidInput when eps <= 0.
Regularized regularized_selection(const ScalarPotential& pot, double s, double eps);

/// J(u) = Σ_i weights_i j(u_i) over boundary nodes.
struct BoundaryFunctional {
  ScalarPotential potential;
  Vector weights;

  BoundaryFunctional(ScalarPotential pot, Vector w);
  double value(const Vector& boundary_values) const;
  double measure() const { return weights.sum(); }
  /// d = √2 d_j max{1, √|Γ_C|}, the growth constant of ∂J on U.
  double lifted_growth_constant() const;
};

struct GrowthReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// min over samples of d_j(1+|s|) - max(|lo|, |hi|)
  double worst_slack = 0.0;
  double lifted_d = 0.0;
  bool ok() const { return violations == 0; }
};

GrowthReport check_growth(const ScalarPotential& pot, const std::vector<double>& samples,
                          double boundary_measure = 1.0);

/// Sampling certificate: lo and hi of ∂j are nondecreasing on the grid
/// [lo, hi] with n points (kinks included).
bool is_monotone_subdifferential(const ScalarPotential& pot, double lo = -10.0, double hi = 10.0,
                                 int n = 4001);

}  // namespace rothe
