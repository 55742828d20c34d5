#include "rothe/inclusion_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "rothe/errors.hpp"

namespace rothe {

namespace {

double metric_norm(const StepOperator& op, const Vector& r) {
  return std::sqrt(op.metric->inverse_quadratic(r));
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NumericalFailure(std::string("solve_step_inclusion: non-finite ") + what);
}

/// Index of the single nonzero in trace row r (selection traces only).
Eigen::Index selected_node(const Matrix& trace, Eigen::Index r) {
  Eigen::Index k = 0;
  trace.row(r).cwiseAbs().maxCoeff(&k);
  return k;
}

/// S + cτ ι^T diag(w_i slope_i) ι, on the band when both the system matrix
/// and the trace allow it.
struct Jacobian {
  Matrix dense;
  std::optional<Tridiagonal> band;
};

Jacobian assemble_jacobian(const StepOperator& op, const Vector& slopes) {
  Jacobian jac;
  const double c = op.scale();
  if (op.system.band() && op.trace_selection) {
    Tridiagonal t = *op.system.band();
    for (Eigen::Index r = 0; r < op.boundary_dim(); ++r) {
      const Eigen::Index k = selected_node(op.trace, r);
      const double tk = op.trace(r, k);
      t.add_to_diagonal(k, c * op.weights[r] * slopes[r] * tk * tk);
    }
    jac.dense = t.to_dense();
    jac.band = std::move(t);
    return jac;
  }
  jac.dense = op.system.dense();
  jac.dense.noalias() += c * op.trace.transpose() * (op.weights.cwiseProduct(slopes)).asDiagonal() * op.trace;
  return jac;
}

Vector solve_jacobian(const StepOperator& op, const Jacobian& jac, const Vector& rhs) {
  try {
    return solve_general(jac.dense, jac.band, rhs);
  } catch (const FactorizationError&) {
    // singular Jacobian on a descending branch: fall back to a Picard step
    return solve_general(op.system.dense(), op.system.band(), rhs);
  }
}

struct Evaluation {
  Vector residual;
  Vector boundary;  // ι u
  Vector flux;      // surrogate values
  Vector slopes;    // surrogate derivatives
  double norm = 0.0;
};

Evaluation evaluate_regularized(const StepProblem& p, const Vector& u, double eps) {
  const StepOperator& op = *p.op;
  Evaluation ev;
  ev.boundary = op.trace * u;
  ev.flux.resize(op.boundary_dim());
  ev.slopes.resize(op.boundary_dim());
  for (Eigen::Index i = 0; i < op.boundary_dim(); ++i) {
    const Regularized r = op.potential.regularized(ev.boundary[i], eps);
    ev.flux[i] = r.value;
    ev.slopes[i] = r.derivative;
  }
  ev.residual = op.system.apply(u) - p.rhs;
  ev.residual.noalias() += op.scale() * op.trace.transpose() * op.weights.cwiseProduct(ev.flux);
  ev.norm = metric_norm(op, ev.residual);
  return ev;
}

/// Damped Newton on the surrogate at a fixed ramp width. Returns true when
/// the residual dropped below tol.
bool newton_level(const StepProblem& p, Vector& u, double eps, double tol, const SolverOptions& opts,
                  SolveReport& report) {
  const StepOperator& op = *p.op;
  Evaluation ev = evaluate_regularized(p, u, eps);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (ev.norm <= tol) return true;
    const Jacobian jac = assemble_jacobian(op, ev.slopes);
    const Vector step = -solve_jacobian(op, jac, ev.residual);
    require_finite(step, "Newton step");
    double lambda = 1.0;
    Vector trial = u + step;
    Evaluation next = evaluate_regularized(p, trial, eps);
    for (int bt = 0; bt < opts.max_backtracks && !(next.norm <= (1.0 - opts.armijo_slope * lambda) * ev.norm);
         ++bt) {
      lambda *= 0.5;
      trial = u + lambda * step;
      next = evaluate_regularized(p, trial, eps);
    }
    require_finite(trial, "iterate");
    ++report.iterations;
    report.residual_history.push_back(next.norm);
    const bool stalled = (trial - u).lpNorm<Eigen::Infinity>() <= 1e-16 * (1.0 + u.lpNorm<Eigen::Infinity>());
    u = std::move(trial);
    ev = std::move(next);
    if (stalled) break;
  }
  return ev.norm <= tol;
}

/// Rescue for a stalled level with a single boundary node: eliminating the
/// interior leaves the scalar equation
///   φ(σ) = σ − ιS⁻¹b + cτ w (ιS⁻¹ιᵀ) r_eps(σ) = 0,   S = M + cτK,
/// whose sign change next to σ₀ = ιu is bracketed by an expanding search and
/// bisected. Newton stalls at folds of nonmonotone laws; bisection does not.
/// r_eps jumps by at most eps·sup|g′| at a ramp end, so the bracket may close
/// on that jump; the next Newton level or the exact pass then finishes.
bool boundary_bracket(const StepProblem& p, Vector& u, double eps) {
  const StepOperator& op = *p.op;
  if (op.boundary_dim() != 1) return false;
  const Jacobian plain = assemble_jacobian(op, Vector::Zero(1));
  const Vector z = solve_jacobian(op, plain, p.rhs);
  const Vector y = solve_jacobian(op, plain, op.trace.row(0).transpose());
  const double s_free = (op.trace * z)[0];
  const double gain = op.scale() * op.weights[0] * (op.trace * y)[0];
  auto phi = [&](double s) { return s - s_free + gain * op.potential.regularized(s, eps).value; };

  const double s0 = (op.trace * u)[0];
  const double f0 = phi(s0);
  if (!std::isfinite(f0)) return false;
  if (f0 == 0.0) return true;
  const double dir = f0 > 0.0 ? -1.0 : 1.0;
  double near = s0, far = s0;
  double h = 1e-3 * std::max(1.0, std::abs(s0));
  bool found = false;
  for (int k = 0; k < 200 && !found; ++k, h *= 2.0) {
    near = far;
    far = s0 + dir * h;
    const double ff = phi(far);
    if (!std::isfinite(ff)) return false;
    found = (ff > 0.0) != (f0 > 0.0) || ff == 0.0;
  }
  if (!found) return false;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (near + far);
    if (mid == near || mid == far) break;
    ((phi(mid) > 0.0) == (f0 > 0.0) ? near : far) = mid;
  }
  u = z - op.scale() * op.weights[0] * op.potential.regularized(far, eps).value * y;
  return true;
}

/// Last resort with a single boundary node: the same reduction with the
/// exact Clarke interval, 0 ∈ σ − ιS⁻¹b + cτ w g ∂j(σ). A root that lands on
/// a kink takes its multiplier from the equation itself.
std::optional<std::pair<Vector, Vector>> exact_boundary_solve(const StepProblem& p, const Vector& u) {
  const StepOperator& op = *p.op;
  if (op.boundary_dim() != 1) return std::nullopt;
  const Jacobian plain = assemble_jacobian(op, Vector::Zero(1));
  const Vector z = solve_jacobian(op, plain, p.rhs);
  const Vector y = solve_jacobian(op, plain, op.trace.row(0).transpose());
  const double s_free = (op.trace * z)[0];
  const double gain = op.scale() * op.weights[0] * (op.trace * y)[0];
  // +1 / −1 when the interval-valued φ(σ) lies strictly on one side, else 0
  auto sign = [&](double s) {
    const Interval c = op.potential.clarke(s);
    if (s - s_free + gain * c.lo > 0.0) return 1;
    if (s - s_free + gain * c.hi < 0.0) return -1;
    return 0;
  };
  auto finish = [&](double s, double xi) {
    Vector v = z - op.scale() * op.weights[0] * xi * y;
    if (op.trace_selection) {
      Eigen::Index col = 0;
      op.trace.row(0).cwiseAbs().maxCoeff(&col);
      v[col] = s / op.trace(0, col);
    }
    return std::make_pair(std::move(v), Vector(Vector::Constant(1, xi)));
  };
  auto on_root = [&](double s) { return finish(s, (s_free - s) / gain); };

  const double s0 = (op.trace * u)[0];
  const int g0 = sign(s0);
  if (g0 == 0) return on_root(s0);
  double near = s0, far = s0, h = 1e-3 * std::max(1.0, std::abs(s0));
  int gf = g0;
  for (int k = 0; k < 200 && gf == g0; ++k, h *= 2.0) {
    near = far;
    far = s0 - g0 * h;
    gf = sign(far);
  }
  if (gf == g0) return std::nullopt;
  if (gf == 0) return on_root(far);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (near + far);
    if (mid == near || mid == far) break;
    const int gm = sign(mid);
    if (gm == 0) return on_root(mid);
    (gm == g0 ? near : far) = mid;
  }
  const double lo = std::min(near, far), hi = std::max(near, far);
  for (const Kink& k : op.potential.kinks())
    if (k.at >= lo && k.at <= hi) return on_root(k.at);
  return finish(far, op.potential.branch(far));
}

struct Pin {
  Eigen::Index node = 0;  // boundary index
  const Kink* kink = nullptr;
};

struct ActiveSetResult {
  Vector u;
  Vector xi;
  bool converged = false;
};

/// Newton on the exact branches with the pinned boundary values held at
/// their kinks; the pinned multipliers come out of a Schur complement.
ActiveSetResult active_set_newton(const StepProblem& p, Vector u, const std::vector<Pin>& pins,
                                  const SolverOptions& opts, SolveReport& report) {
  const StepOperator& op = *p.op;
  const double c = op.scale();
  const Eigen::Index nb = op.boundary_dim();
  const auto npin = static_cast<Eigen::Index>(pins.size());
  std::vector<bool> pinned(static_cast<std::size_t>(nb), false);
  for (const Pin& pin : pins) pinned[static_cast<std::size_t>(pin.node)] = true;

  Vector mu = Vector::Zero(npin);
  for (Eigen::Index k = 0; k < npin; ++k) {
    const Kink& kk = *pins[static_cast<std::size_t>(k)].kink;
    mu[k] = 0.5 * (kk.left + kk.right);
  }
  Matrix tk(npin, op.dim());
  for (Eigen::Index k = 0; k < npin; ++k) tk.row(k) = op.trace.row(pins[static_cast<std::size_t>(k)].node);

  const double scale_b = 1.0 + metric_norm(op, p.rhs);
  ActiveSetResult out;
  Vector xi(nb);
  double prev_norm = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    const Vector s = op.trace * u;
    Vector slopes = Vector::Zero(nb);
    for (Eigen::Index i = 0; i < nb; ++i) {
      if (pinned[static_cast<std::size_t>(i)]) continue;
      xi[i] = op.potential.branch(s[i]);
      slopes[i] = op.potential.branch_slope(s[i]);
    }
    for (Eigen::Index k = 0; k < npin; ++k) xi[pins[static_cast<std::size_t>(k)].node] = mu[k];
    Vector f = op.system.apply(u) - p.rhs;
    f.noalias() += c * op.trace.transpose() * op.weights.cwiseProduct(xi);
    Vector gap(npin);
    for (Eigen::Index k = 0; k < npin; ++k)
      gap[k] = s[pins[static_cast<std::size_t>(k)].node] - pins[static_cast<std::size_t>(k)].kink->at;
    const double fnorm = metric_norm(op, f);
    report.residual_history.push_back(fnorm);
    const double gap_norm = npin > 0 ? gap.lpNorm<Eigen::Infinity>() : 0.0;
    const bool tight = fnorm <= 1e-14 * scale_b && gap_norm <= 1e-15 * (1.0 + u.lpNorm<Eigen::Infinity>());
    // quadratic convergence stalls at roundoff: stop once the norm no longer drops
    if (tight || fnorm >= 0.5 * prev_norm) {
      out.converged = fnorm <= opts.tol;
      break;
    }
    prev_norm = fnorm;
    const Jacobian jac = assemble_jacobian(op, slopes);
    Vector du = solve_jacobian(op, jac, -f);
    if (npin > 0) {
      // [J  cτ Tk^T Wk; Tk 0] [du; dmu] = [-f; -gap]
      Matrix z(op.dim(), npin);
      for (Eigen::Index k = 0; k < npin; ++k) {
        const double w = op.weights[pins[static_cast<std::size_t>(k)].node];
        z.col(k) = solve_jacobian(op, jac, Vector(c * w * tk.row(k).transpose()));
      }
      const Matrix schur = tk * z;
      const Vector dmu = schur.fullPivLu().solve(tk * du + gap);
      du -= z * dmu;
      mu += dmu;
    }
    require_finite(du, "active-set step");
    u += du;
    ++report.iterations;
    out.converged = false;
  }
  out.u = std::move(u);
  const Vector s = op.trace * out.u;
  for (Eigen::Index i = 0; i < nb; ++i)
    if (!pinned[static_cast<std::size_t>(i)]) xi[i] = op.potential.branch(s[i]);
  for (Eigen::Index k = 0; k < npin; ++k) xi[pins[static_cast<std::size_t>(k)].node] = mu[k];
  out.xi = std::move(xi);
  return out;
}

/// Nearest kink within reach of s, if any.
const Kink* nearby_kink(const ScalarPotential& pot, double s, double reach) {
  const Kink* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Kink& k : pot.kinks()) {
    const double d = std::abs(s - k.at);
    if (d <= reach * (1.0 + std::abs(k.at)) && d < best_d) {
      best = &k;
      best_d = d;
    }
  }
  return best;
}

Vector project_flux(const StepOperator& op, const Vector& u, const Vector& flux) {
  const Vector s = op.trace * u;
  Vector xi(op.boundary_dim());
  for (Eigen::Index i = 0; i < op.boundary_dim(); ++i) xi[i] = op.potential.clarke(s[i]).project(flux[i]);
  return xi;
}

double roundoff_reach(double s) { return 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s)); }

double membership_slack(const StepOperator& op, const Vector& u, const Vector& xi) {
  const Vector s = op.trace * u;
  double slack = 0.0;
  for (Eigen::Index i = 0; i < op.boundary_dim(); ++i)
    slack = std::max(slack, op.potential.clarke_near(s[i], roundoff_reach(s[i])).distance(xi[i]));
  return slack;
}

}  // namespace

std::shared_ptr<const StepOperator> make_step_operator(Matrix mass, Matrix stiffness, Matrix trace,
                                                       Vector weights, ScalarPotential potential,
                                                       double c_coef, double tau,
                                                       std::optional<Matrix> metric) {
  if (!(tau > 0.0)) throw InvalidInput("StepOperator: tau must be positive");
  if (!(c_coef > 0.0)) throw InvalidInput("StepOperator: c_coef must be positive");
  if (mass.rows() != stiffness.rows() || trace.cols() != mass.rows() || weights.size() != trace.rows())
    throw InvalidInput("StepOperator: dimension mismatch");
  if ((weights.array() <= 0.0).any()) throw InvalidInput("StepOperator: weights must be positive");
  auto op = std::make_shared<StepOperator>(StepOperator{
      SymmetricMatrix(std::move(mass)), SymmetricMatrix(std::move(stiffness)), SymmetricMatrix(),
      std::move(trace), std::move(weights), std::move(potential), c_coef, tau, nullptr, false});
  op->system = op->mass.combine(1.0, op->stiffness, c_coef * tau);
  op->metric = std::make_shared<const SpdFactor>(
      metric ? SymmetricMatrix(std::move(*metric)) : op->mass.combine(1.0, op->stiffness, 1.0));
  SpdFactor mass_check(op->mass);
  (void)mass_check;
  op->trace_selection = true;
  for (Eigen::Index r = 0; r < op->trace.rows(); ++r)
    if ((op->trace.row(r).array() != 0.0).count() != 1) op->trace_selection = false;
  return op;
}

std::shared_ptr<const StepOperator> make_step_operator(const GalerkinSpace& space,
                                                       const LinearOperatorA& a,
                                                       const BoundaryFunctional& j, double c_coef,
                                                       double tau) {
  if (a.dim() != space.dim() || j.weights.size() != space.boundary_dim())
    throw InvalidInput("StepOperator: space/operator/functional dimension mismatch");
  if (!(tau > 0.0)) throw InvalidInput("StepOperator: tau must be positive");
  auto op = std::make_shared<StepOperator>(StepOperator{
      space.gram_h(), a.stiffness, space.gram_h().combine(1.0, a.stiffness, c_coef * tau), space.trace(),
      j.weights, j.potential, c_coef, tau, nullptr, space.trace_is_selection()});
  op->metric = space.shared_gram_v_factor();
  return op;
}

Vector inclusion_residual(const StepProblem& p, const Vector& u, const Vector& xi) {
  const StepOperator& op = *p.op;
  if (u.size() != op.dim() || xi.size() != op.boundary_dim() || p.rhs.size() != op.dim())
    throw InvalidInput("inclusion_residual: dimension mismatch");
  Vector r = op.system.apply(u) - p.rhs;
  r.noalias() += op.scale() * op.trace.transpose() * op.weights.cwiseProduct(xi);
  return r;
}

Vector solve_regularized(const StepProblem& p, const Vector& warm_start, double eps, const SolverOptions& opts) {
  if (!(eps > 0.0)) throw InvalidInput("solve_regularized: eps must be positive");
  if (p.rhs.size() != p.op->dim() || warm_start.size() != p.op->dim())
    throw InvalidInput("solve_regularized: dimension mismatch");
  SolveReport report;
  Vector u = warm_start;
  if (!newton_level(p, u, eps, opts.tol, opts, report))
    throw NonConvergence("solve_regularized: no convergence", report.residual_history);
  return u;
}

InclusionCheck verify_inclusion(const StepProblem& p, const Vector& u, const Vector& xi, double tol) {
  InclusionCheck c;
  c.residual = metric_norm(*p.op, inclusion_residual(p, u, xi));
  c.membership_slack = membership_slack(*p.op, u, xi);
  c.membership_ok = c.membership_slack <= tol;
  return c;
}

StepSolution solve_step_inclusion(const StepProblem& p, const Vector& warm_start, const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidInput("solve_step_inclusion: tol must be positive");
  if (!(opts.eps0 > 0.0) || !(opts.eps_min > 0.0) || opts.eps_min > opts.eps0)
    throw InvalidInput("solve_step_inclusion: need 0 < eps_min <= eps0");
  const StepOperator& op = *p.op;
  if (p.rhs.size() != op.dim() || warm_start.size() != op.dim())
    throw InvalidInput("solve_step_inclusion: dimension mismatch");
  require_finite(p.rhs, "right-hand side");

  StepSolution sol;
  SolveReport& report = sol.report;
  Vector u = warm_start;
  require_finite(u, "warm start");

  std::vector<double> schedule;
  if (op.potential.kinks().empty()) {
    schedule.push_back(opts.eps_min);
  } else {
    for (double eps = opts.eps0; eps > opts.eps_min; eps *= opts.eps_factor) schedule.push_back(eps);
    schedule.push_back(opts.eps_min);
  }
  bool last_ok = false;
  for (double eps : schedule) {
    last_ok = newton_level(p, u, eps, opts.tol, opts, report);
    if (!last_ok && boundary_bracket(p, u, eps)) last_ok = newton_level(p, u, eps, opts.tol, opts, report);
    report.regularization_eps_final = eps;
  }

  // active-set pass: pin boundary values that sit on a kink
  const Vector s = op.trace * u;
  std::vector<Pin> pins;
  const double reach = std::max(1e-6, 10.0 * opts.eps_min);
  for (Eigen::Index i = 0; i < op.boundary_dim(); ++i)
    if (const Kink* k = nearby_kink(op.potential, s[i], reach)) pins.push_back({i, k});

  std::optional<ActiveSetResult> polished;
  for (std::size_t round = 0; round <= pins.size() + 1; ++round) {
    ActiveSetResult r = active_set_newton(p, u, pins, opts, report);
    if (!r.converged || !r.u.allFinite()) break;
    // release the pin whose multiplier left its interval the most
    double worst = opts.tol_membership;
    std::size_t worst_k = pins.size();
    for (std::size_t k = 0; k < pins.size(); ++k) {
      const Kink& kk = *pins[k].kink;
      const Interval iv{std::min(kk.left, kk.right), std::max(kk.left, kk.right)};
      const double d = iv.distance(r.xi[pins[k].node]);
      if (d > worst) {
        worst = d;
        worst_k = k;
      }
    }
    if (worst_k == pins.size()) {
      polished = std::move(r);
      break;
    }
    pins.erase(pins.begin() + static_cast<std::ptrdiff_t>(worst_k));
  }

  if (polished) {
    // the pin holds s at the kink only to roundoff; with a selection trace
    // the boundary coefficient can sit on it exactly
    if (op.trace_selection) {
      for (const Pin& pin : pins) {
        Eigen::Index col = 0;
        op.trace.row(pin.node).cwiseAbs().maxCoeff(&col);
        polished->u[col] = pin.kink->at / op.trace(pin.node, col);
      }
    }
    sol.u = std::move(polished->u);
    sol.xi = std::move(polished->xi);
    report.pinned_nodes = static_cast<int>(pins.size());
  } else {
    const Evaluation ev = evaluate_regularized(p, u, report.regularization_eps_final);
    sol.xi = project_flux(op, u, ev.flux);
    sol.u = std::move(u);
  }
  require_finite(sol.u, "solution");
  InclusionCheck chk = verify_inclusion(p, sol.u, sol.xi, opts.tol_membership);
  if (chk.residual > opts.tol || chk.membership_slack > opts.tol_membership) {
    if (auto exact = exact_boundary_solve(p, sol.u)) {
      const InclusionCheck alt = verify_inclusion(p, exact->first, exact->second, opts.tol_membership);
      if (alt.residual <= opts.tol && alt.membership_slack <= opts.tol_membership) {
        sol.u = std::move(exact->first);
        sol.xi = std::move(exact->second);
        chk = alt;
      }
    }
  }
  report.residual = chk.residual;
  report.membership_slack = chk.membership_slack;
  if (chk.residual > opts.tol || chk.membership_slack > opts.tol_membership) {
    std::ostringstream os;
    os << "solve_step_inclusion: no convergence (residual " << chk.residual << ", membership slack "
       << chk.membership_slack << ", last level " << (last_ok ? "converged" : "failed") << ")";
    throw NonConvergence(os.str(), report.residual_history);
  }
  return sol;
}

}  // namespace rothe
