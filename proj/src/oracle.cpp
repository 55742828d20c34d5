#include "rothe/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "rothe/errors.hpp"

namespace rothe::oracle {

namespace {

/// Interval-valued scalar residual a·s + κ·ζ(s) − r.
struct ScalarInclusion {
  double a;      // coefficient of s
  double kappa;  // coefficient of ζ(s)
  double r;
  const ScalarPotential* pot;

  Interval at(double s) const {
    const Interval z = pot->clarke(s);
    const double v1 = a * s + kappa * z.lo - r;
    const double v2 = a * s + kappa * z.hi - r;
    return {std::min(v1, v2), std::max(v1, v2)};
  }
  double branch(double s) const { return a * s + kappa * pot->branch(s) - r; }
};

std::vector<double> scan(const ScalarInclusion& f, double lo, double hi, int grid_n) {
  if (grid_n < 1000) throw InvalidInput("scan_roots: grid_n must be at least 1000");
  if (!(hi > lo)) throw InvalidInput("scan_roots: empty range");
  std::vector<double> pts;
  for (int i = 0; i <= grid_n; ++i) pts.push_back(lo + (hi - lo) * i / grid_n);
  for (const Kink& k : f.pot->kinks())
    if (k.at > lo && k.at < hi) pts.push_back(k.at);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto is_kink = [&](double s) {
    return std::any_of(f.pot->kinks().begin(), f.pot->kinks().end(), [&](const Kink& k) { return k.at == s; });
  };

  std::vector<double> roots;
  auto add = [&](double s) {
    if (roots.empty() || std::abs(s - roots.back()) > 1e-9) roots.push_back(s);
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Interval v = f.at(pts[i]);
    if (v.lo <= 0.0 && v.hi >= 0.0) {
      add(pts[i]);
      continue;
    }
    if (i + 1 == pts.size()) continue;
    // open cell (pts[i], pts[i+1]) holds no kink: ρ is single valued and
    // continuous there; use the one-sided limits at the cell ends
    const double a = pts[i], b = pts[i + 1];
    const double fa = is_kink(a) ? f.branch(a) : v.lo;
    const Interval vb = f.at(b);
    double fb = vb.lo;
    if (is_kink(b)) {
      const Kink* k = nullptr;
      for (const Kink& kk : f.pot->kinks())
        if (kk.at == b) k = &kk;
      fb = f.a * b + f.kappa * k->left - f.r;
    }
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      double x0 = a, x1 = b, f0 = fa;
      while (x1 - x0 > 1e-12 * (1.0 + std::abs(x0))) {
        const double m = 0.5 * (x0 + x1);
        const double fm = f.branch(m);
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = m;
          f0 = fm;
        } else {
          x1 = m;
        }
      }
      add(0.5 * (x0 + x1));
    }
  }
  return roots;
}

}  // namespace

std::vector<double> scan_roots_1d(const StepProblem& p, double lo, double hi, int grid_n) {
  const StepOperator& op = *p.op;
  if (op.dim() != 1 || op.boundary_dim() != 1) throw InvalidInput("scan_roots_1d: needs dim = 1 and one boundary node");
  const double t = op.trace(0, 0);
  if (t == 0.0) throw InvalidInput("scan_roots_1d: zero trace");
  const double m = op.mass.dense()(0, 0);
  const double k = op.stiffness.dense()(0, 0);
  const double c = op.scale();
  // work in s = t u so kinks land on grid points, then map back
  ScalarInclusion f{(m + c * k) / t, c * op.weights[0] * t, p.rhs[0], &op.potential};
  const double slo = std::min(t * lo, t * hi), shi = std::max(t * lo, t * hi);
  std::vector<double> s_roots = scan(f, slo, shi, grid_n);
  std::vector<double> u_roots;
  for (double s : s_roots) u_roots.push_back(s / t);
  std::sort(u_roots.begin(), u_roots.end());
  return u_roots;
}

std::vector<OracleRoot> scan_roots_single_boundary(const StepProblem& p, double lo, double hi, int grid_n) {
  const StepOperator& op = *p.op;
  if (op.boundary_dim() != 1) throw InvalidInput("scan_roots_single_boundary: needs one boundary node");
  const Matrix s_mat = op.system.dense();
  const Eigen::LDLT<Matrix> ldlt(s_mat);
  if (ldlt.info() != Eigen::Success) throw FactorizationError("scan_roots_single_boundary: singular system");
  const Vector t = op.trace.row(0).transpose();
  const Vector sinv_b = ldlt.solve(p.rhs);
  const Vector sinv_t = ldlt.solve(t);
  const double q = t.dot(sinv_t);
  const double c = op.scale() * op.weights[0];
  // s = tᵀS⁻¹b − c q ζ(s)
  ScalarInclusion f{1.0, c * q, t.dot(sinv_b), &op.potential};
  std::vector<OracleRoot> out;
  for (double s : scan(f, lo, hi, grid_n)) {
    const double zeta = (f.r - s) / (c * q);
    Vector xi(1);
    xi[0] = op.potential.clarke(s).project(zeta);
    out.push_back({sinv_b - c * zeta * sinv_t, xi});
  }
  return out;
}

double step_energy(const StepProblem& p, const Vector& u) {
  const StepOperator& op = *p.op;
  const Vector s = op.trace * u;
  double j = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) j += op.weights[i] * op.potential.value(s[i]);
  return 0.5 * op.system.quadratic(u) + op.scale() * j - p.rhs.dot(u);
}

Vector minimize_energy_convex(const StepProblem& p, double tol, int max_sweeps) {
  const StepOperator& op = *p.op;
  if (!op.potential.convex() || !is_monotone_subdifferential(op.potential))
    throw PreconditionError("minimize_energy_convex: potential is not convex");
  const Eigen::Index n = op.dim();
  Vector u = Vector::Zero(n);
  constexpr double kInvPhi = 0.6180339887498948482;

  auto along = [&](Eigen::Index k, double x) {
    Vector v = u;
    v[k] = x;
    return step_energy(p, v);
  };
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      // bracket the 1-D minimum by doubling
      const double x0 = u[k];
      double h = 1e-3 * (1.0 + std::abs(x0));
      double a = x0 - h, b = x0 + h;
      const double e0 = along(k, x0);
      while (along(k, a) < e0) {
        h *= 2.0;
        a = x0 - h;
      }
      h = 1e-3 * (1.0 + std::abs(x0));
      while (along(k, b) < e0) {
        h *= 2.0;
        b = x0 + h;
      }
      double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
      double fc = along(k, c), fd = along(k, d);
      while (b - a > 1e-13 * (1.0 + std::abs(a))) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - kInvPhi * (b - a);
          fc = along(k, c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + kInvPhi * (b - a);
          fd = along(k, d);
        }
      }
      const double xn = 0.5 * (a + b);
      if (along(k, xn) <= e0) {
        moved = std::max(moved, std::abs(xn - x0));
        u[k] = xn;
      }
    }
    if (moved <= tol) break;
  }
  return u;
}

RotheTrajectory reference_solution(const Problem& problem, int fine_steps, Scheme scheme) {
  SolverOptions opts;
  opts.tol = 1e-12;
  opts.tol_membership = 1e-12;
  return run_rothe(problem, TimeGrid(problem.T_final, fine_steps), scheme, opts);
}

Vector exact_linear_solution(const Problem& problem, const DualVector& f_const, double t) {
  const ScalarPotential& pot = problem.functional.potential;
  double k = 0.0;
  if (const auto* lr = std::get_if<LinearRobin>(&pot.kind()))
    k = lr->k;
  else if (!std::holds_alternative<ZeroPotential>(pot.kind()))
    throw PreconditionError("exact_linear_solution: needs a linear potential");
  const GalerkinSpace& space = problem.space;
  const Matrix& tr = space.trace();
  const Matrix kk = problem.op.stiffness.dense() +
                    k * tr.transpose() * problem.functional.weights.asDiagonal() * tr;
  const Matrix& m = space.gram_h().dense();
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(kk, m);
  if (es.info() != Eigen::Success) throw FactorizationError("exact_linear_solution: eigensolver failed");
  // kk V = m V Λ with Vᵀ m V = I; modal coordinates c = Vᵀ m u
  const Matrix& v = es.eigenvectors();
  const Vector& lambda = es.eigenvalues();
  const Vector c0 = v.transpose() * m * problem.u0;
  const Vector g = v.transpose() * f_const.coeffs;
  Vector c(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double l = lambda[i];
    const double e = std::exp(-l * t);
    // c' = -l c + g
    const double growth = std::abs(l) < 1e-14 ? t : -std::expm1(-l * t) / l;
    c[i] = e * c0[i] + growth * g[i];
  }
  return v * c;
}

}  // namespace rothe::oracle
