#include "rothe/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rothe/errors.hpp"

namespace rothe {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double paper_branch(const PaperExponential& p, double s) {
  return p.literal_subdiff ? p.d * std::exp(-s) + s : p.d * std::exp(-s) + p.d * s;
}

double paper_branch_slope(const PaperExponential& p, double s) {
  return p.literal_subdiff ? -p.d * std::exp(-s) + 1.0 : -p.d * std::exp(-s) + p.d;
}

struct PiecewiseLayout {
  double a, b;       // kink, kink + width
  double g_after_a;  // g(a+)
  double g_at_b;     // g(b)
};

PiecewiseLayout layout(const NonconvexPiecewise& p) {
  const double ga = p.slope * p.kink + p.jump;
  return {p.kink, p.kink + p.width, ga, ga - p.descent * p.width};
}

double piecewise_branch(const NonconvexPiecewise& p, double s) {
  const auto l = layout(p);
  if (s < l.a) return p.slope * s;
  if (s < l.b) return l.g_after_a - p.descent * (s - l.a);
  return l.g_at_b + p.slope * (s - l.b);
}

double piecewise_antiderivative(const NonconvexPiecewise& p, double s) {
  const auto l = layout(p);
  if (s < l.a) return 0.5 * p.slope * s * s;
  const double ga = 0.5 * p.slope * l.a * l.a;
  if (s < l.b) {
    const double r = s - l.a;
    return ga + l.g_after_a * r - 0.5 * p.descent * r * r;
  }
  const double gb = ga + l.g_after_a * p.width - 0.5 * p.descent * p.width * p.width;
  const double r = s - l.b;
  return gb + l.g_at_b * r + 0.5 * p.slope * r * r;
}

double default_d_j(const ScalarPotential::Kind& kind) {
  return std::visit(
      overloaded{
          [](const PaperExponential& p) { return p.literal_subdiff ? std::max(p.d, 1.0) : p.d; },
          [](const LinearRobin& p) { return p.k != 0.0 ? std::abs(p.k) : 1.0; },
          [](const NonconvexPiecewise& p) {
            // each linear piece c0 + c1 s obeys |g| <= max(|c0|, |c1|)(1 + |s|)
            const auto l = layout(p);
            const double c2 = l.g_after_a + p.descent * l.a;
            const double c3 = l.g_at_b - p.slope * l.b;
            return std::max({std::abs(p.slope), std::abs(c2), p.descent, std::abs(c3), 1e-300});
          },
          [](const ZeroPotential&) { return 1.0; }},
      kind);
}

void validate(const ScalarPotential::Kind& kind) {
  std::visit(overloaded{[](const PaperExponential& p) {
                          if (!(p.d > 0.0)) throw InvalidInput("PaperExponential: d must be positive");
                        },
                        [](const LinearRobin& p) {
                          if (!(p.k >= 0.0)) throw InvalidInput("LinearRobin: k must be nonnegative");
                        },
                        [](const NonconvexPiecewise& p) {
                          if (!(p.width > 0.0)) throw InvalidInput("NonconvexPiecewise: width must be positive");
                          if (!std::isfinite(p.slope + p.kink + p.jump + p.descent))
                            throw InvalidInput("NonconvexPiecewise: non-finite parameter");
                        },
                        [](const ZeroPotential&) {}},
             kind);
}

}  // namespace

ScalarPotential::ScalarPotential(Kind kind) : ScalarPotential(kind, default_d_j(kind)) {}

ScalarPotential::ScalarPotential(Kind kind, double d_j) : kind_(std::move(kind)), d_j_(d_j) {
  validate(kind_);
  if (!(d_j_ > 0.0)) throw InvalidInput("ScalarPotential: d_j must be positive");
  std::visit(overloaded{[&](const PaperExponential& p) { kinks_.push_back({0.0, 0.0, p.d}); },
                        [&](const NonconvexPiecewise& p) {
                          if (p.jump != 0.0)
                            kinks_.push_back({p.kink, p.slope * p.kink, p.slope * p.kink + p.jump});
                        },
                        [](const auto&) {}},
             kind_);
}

std::string ScalarPotential::name() const {
  return std::visit(overloaded{[](const PaperExponential&) { return std::string("paper_exponential"); },
                               [](const LinearRobin&) { return std::string("linear_robin"); },
                               [](const NonconvexPiecewise&) { return std::string("nonconvex_piecewise"); },
                               [](const ZeroPotential&) { return std::string("zero"); }},
                    kind_);
}

double ScalarPotential::value(double s) const {
  return std::visit(overloaded{[&](const PaperExponential& p) {
                                 return s < 0.0 ? 0.0 : -p.d * std::exp(-s) + 0.5 * p.d * s * s + p.d;
                               },
                               [&](const LinearRobin& p) { return 0.5 * p.k * s * s; },
                               [&](const NonconvexPiecewise& p) {
                                 return piecewise_antiderivative(p, s) - piecewise_antiderivative(p, 0.0);
                               },
                               [](const ZeroPotential&) { return 0.0; }},
                    kind_);
}

double ScalarPotential::branch(double s) const {
  return std::visit(overloaded{[&](const PaperExponential& p) { return s < 0.0 ? 0.0 : paper_branch(p, s); },
                               [&](const LinearRobin& p) { return p.k * s; },
                               [&](const NonconvexPiecewise& p) { return piecewise_branch(p, s); },
                               [](const ZeroPotential&) { return 0.0; }},
                    kind_);
}

double ScalarPotential::branch_slope(double s) const {
  return std::visit(overloaded{[&](const PaperExponential& p) { return s < 0.0 ? 0.0 : paper_branch_slope(p, s); },
                               [&](const LinearRobin& p) { return p.k; },
                               [&](const NonconvexPiecewise& p) {
                                 const auto l = layout(p);
                                 return (s > l.a && s < l.b) ? -p.descent : p.slope;
                               },
                               [](const ZeroPotential&) { return 0.0; }},
                    kind_);
}

Interval ScalarPotential::clarke(double s) const {
  for (const Kink& k : kinks_)
    if (s == k.at) return {std::min(k.left, k.right), std::max(k.left, k.right)};
  const double g = branch(s);
  return {g, g};
}

Interval ScalarPotential::clarke_near(double s, double reach) const {
  Interval iv = clarke(s);
  for (const Kink& k : kinks_)
    if (std::abs(s - k.at) <= reach) {
      iv.lo = std::min({iv.lo, k.left, k.right});
      iv.hi = std::max({iv.hi, k.left, k.right});
    }
  return iv;
}

const Kink* ScalarPotential::ramp_kink(double s, double eps) const {
  for (const Kink& k : kinks_) {
    if (k.right >= k.left) {
      if (s >= k.at && s < k.at + eps) return &k;
    } else if (s > k.at - eps && s <= k.at) {
      return &k;
    }
  }
  return nullptr;
}

Regularized ScalarPotential::regularized(double s, double eps) const {
  if (const Kink* k = ramp_kink(s, eps)) {
    const double slope = (k->right - k->left) / eps;
    const double start = k->right >= k->left ? k->at : k->at - eps;
    return {k->left + slope * (s - start), slope};
  }
  return {branch(s), branch_slope(s)};
}

bool ScalarPotential::convex() const {
  return std::visit(overloaded{[](const PaperExponential&) { return true; },
                               [](const LinearRobin& p) { return p.k >= 0.0; },
                               [](const NonconvexPiecewise&) { return false; },
                               [](const ZeroPotential&) { return true; }},
                    kind_);
}

Regularized regularized_selection(const ScalarPotential& pot, double s, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("regularized_selection: eps must be positive");
  return pot.regularized(s, eps);
}

BoundaryFunctional::BoundaryFunctional(ScalarPotential pot, Vector w)
    : potential(std::move(pot)), weights(std::move(w)) {
  if ((weights.array() <= 0.0).any()) throw InvalidInput("BoundaryFunctional: weights must be positive");
}

double BoundaryFunctional::value(const Vector& boundary_values) const {
  if (boundary_values.size() != weights.size()) throw InvalidInput("BoundaryFunctional: dimension mismatch");
  double j = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) j += weights[i] * potential.value(boundary_values[i]);
  return j;
}

double BoundaryFunctional::lifted_growth_constant() const {
  return std::sqrt(2.0) * potential.d_j() * std::max(1.0, std::sqrt(measure()));
}

GrowthReport check_growth(const ScalarPotential& pot, const std::vector<double>& samples,
                          double boundary_measure) {
  if (samples.empty()) throw InvalidInput("check_growth: empty sample list");
  GrowthReport rep;
  rep.samples = samples.size();
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (double s : samples) {
    const Interval iv = pot.clarke(s);
    const double bound = pot.d_j() * (1.0 + std::abs(s));
    const double slack = bound - std::max(std::abs(iv.lo), std::abs(iv.hi));
    rep.worst_slack = std::min(rep.worst_slack, slack);
    if (slack < -1e-12 * (1.0 + bound)) ++rep.violations;
  }
  rep.lifted_d = std::sqrt(2.0) * pot.d_j() * std::max(1.0, std::sqrt(boundary_measure));
  return rep;
}

bool is_monotone_subdifferential(const ScalarPotential& pot, double lo, double hi, int n) {
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(n) + 3 * pot.kinks().size());
  for (int i = 0; i < n; ++i) pts.push_back(lo + (hi - lo) * i / (n - 1));
  for (const Kink& k : pot.kinks()) {
    const double h = 1e-9 * (1.0 + std::abs(k.at));
    pts.insert(pts.end(), {k.at - h, k.at, k.at + h});
  }
  std::sort(pts.begin(), pts.end());
  Interval prev = pot.clarke(pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Interval cur = pot.clarke(pts[i]);
    const double tol = 1e-12 * (1.0 + std::abs(prev.hi));
    if (cur.lo < prev.lo - tol || cur.hi < prev.hi - tol) return false;
    prev = cur;
  }
  return true;
}

}  // namespace rothe
