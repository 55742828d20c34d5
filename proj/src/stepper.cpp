#include "rothe/stepper.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "rothe/errors.hpp"

namespace rothe {

namespace {

// five-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 5> kNodes = {-0.9061798459386639928, -0.5384693101056830910, 0.0,
                                          0.5384693101056830910, 0.9061798459386639928};
constexpr std::array<double, 5> kWeights = {0.2369268850561890875, 0.4786286704993664680,
                                            0.5688888888888888889, 0.4786286704993664680,
                                            0.2369268850561890875};

/// The solver tolerance applies to the step equation divided by cτ; the
/// floor keeps it above the roundoff level of the assembled right-hand side.
SolverOptions scaled_options(const StepOperator& op, const Vector& rhs, const SolverOptions& opts) {
  SolverOptions s = opts;
  const double rhs_norm = std::sqrt(op.metric->inverse_quadratic(rhs));
  s.tol = std::max(opts.tol * op.scale(), 1e-14 * (1.0 + rhs_norm));
  return s;
}

}  // namespace

TimeGrid::TimeGrid(double T, int steps) : T_final(T), N(steps), tau(T / steps) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInput("TimeGrid: T_final must be positive");
  if (steps < 1) throw InvalidInput("TimeGrid: N must be at least 1");
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::BDF2: return "bdf2";
    case Scheme::BackwardEuler: return "backward_euler";
    case Scheme::BackwardEulerAveraged: return "backward_euler_averaged";
  }
  return "unknown";
}

bool is_one_step(Scheme s) { return s != Scheme::BDF2; }

Scheme parse_scheme(const std::string& name) {
  if (name == "bdf2") return Scheme::BDF2;
  if (name == "backward_euler" || name == "be") return Scheme::BackwardEuler;
  if (name == "backward_euler_averaged") return Scheme::BackwardEulerAveraged;
  throw InvalidInput("unknown scheme '" + name + "'");
}

DualVector window_average(const ForcingSource& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  Vector acc;
  for (std::size_t q = 0; q < kNodes.size(); ++q) {
    const DualVector v = f(mid + half * kNodes[q]);
    if (q == 0) acc = Vector::Zero(v.size());
    acc += kWeights[q] * v.coeffs;
  }
  return DualVector(0.5 * acc);
}

DualVector average_forcing(const ForcingSource& f, int n, const TimeGrid& grid) {
  if (n < 1 || n > grid.N) throw InvalidInput("average_forcing: step index out of range");
  const double tau = grid.tau;
  if (n == 1) return window_average(f, 0.0, tau);
  const DualVector cur = window_average(f, (n - 1) * tau, n * tau);
  const DualVector prev = window_average(f, (n - 2) * tau, (n - 1) * tau);
  return DualVector(1.5 * cur.coeffs - 0.5 * prev.coeffs);
}

StepSolution initial_step(const std::shared_ptr<const StepOperator>& op, const Vector& u_prev,
                          const DualVector& f1, const Vector& warm_start, const SolverOptions& opts) {
  if (op->c_coef != 1.0) throw InvalidInput("initial_step: step operator must have c = 1");
  StepProblem p{op, op->tau * f1.coeffs + op->mass.apply(u_prev)};
  return solve_step_inclusion(p, warm_start, scaled_options(*op, p.rhs, opts));
}

StepSolution bdf2_step(const std::shared_ptr<const StepOperator>& op, const Vector& u_nm1,
                       const Vector& u_nm2, const DualVector& fn, const SolverOptions& opts) {
  if (std::abs(op->c_coef - 2.0 / 3.0) > 1e-15) throw InvalidInput("bdf2_step: step operator must have c = 2/3");
  const Vector history = (4.0 / 3.0) * u_nm1 - (1.0 / 3.0) * u_nm2;
  StepProblem p{op, (2.0 / 3.0) * op->tau * fn.coeffs + op->mass.apply(history)};
  const Vector warm = 2.0 * u_nm1 - u_nm2;
  return solve_step_inclusion(p, warm, scaled_options(*op, p.rhs, opts));
}

RotheTrajectory run_rothe(const Problem& problem, const TimeGrid& grid, Scheme scheme, const SolverOptions& opts) {
  if (scheme == Scheme::BDF2 && grid.N < 2) throw InvalidInput("run_rothe: BDF2 needs N >= 2");
  if (problem.u0.size() != problem.space.dim()) throw InvalidInput("run_rothe: u0 dimension mismatch");
  RotheTrajectory traj{grid, scheme, {}, {}, {}, {}, {}, {}};
  traj.u.reserve(static_cast<std::size_t>(grid.N) + 1);
  traj.u.push_back(problem.u0);

  const auto first = make_step_operator(problem.space, problem.op, problem.functional, 1.0, grid.tau);
  std::shared_ptr<const StepOperator> later;
  if (scheme == Scheme::BDF2)
    later = make_step_operator(problem.space, problem.op, problem.functional, 2.0 / 3.0, grid.tau);

  for (int n = 1; n <= grid.N; ++n) {
    const double tau = grid.tau;
    DualVector fn = scheme == Scheme::BDF2            ? average_forcing(problem.forcing, n, grid)
                    : scheme == Scheme::BackwardEuler ? problem.forcing(grid.t(n))
                                                      : window_average(problem.forcing, (n - 1) * tau, n * tau);
    try {
      StepSolution s;
      const Vector& prev = traj.u.back();
      if (n == 1) {
        s = initial_step(first, prev, fn, prev, opts);
      } else if (scheme == Scheme::BDF2) {
        s = bdf2_step(later, prev, traj.u[traj.u.size() - 2], fn, opts);
      } else {
        const Vector warm = 2.0 * prev - traj.u[traj.u.size() - 2];
        s = initial_step(first, prev, fn, warm, opts);
      }
      const double c_tau = (n == 1 || is_one_step(scheme)) ? tau : (2.0 / 3.0) * tau;
      traj.per_step_residuals.push_back(s.report.residual / c_tau);
      traj.membership_slacks.push_back(s.report.membership_slack);
      traj.iterations.push_back(s.report.iterations);
      traj.u.push_back(std::move(s.u));
      traj.xi.push_back(std::move(s.xi));
      traj.f_avg.push_back(std::move(fn));
    } catch (const NonConvergence& e) {
      std::ostringstream os;
      os << "run_rothe: step " << n << " failed: " << e.what();
      throw StepFailure(os.str(), n, e.residual_history);
    } catch (const NumericalFailure& e) {
      std::ostringstream os;
      os << "run_rothe: step " << n << " failed: " << e.what();
      throw StepFailure(os.str(), n, {});
    }
  }
  return traj;
}

double worst_case_pairing(const GalerkinSpace& space, const LinearOperatorA& a, const BoundaryFunctional& j,
                          double c_tau, const Vector& v) {
  const Vector s = space.apply_trace(v);
  double boundary = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const Interval iv = j.potential.clarke(s[i]);
    boundary += j.weights[i] * std::min(iv.lo * s[i], iv.hi * s[i]);
  }
  return space.gram_h().quadratic(v) + c_tau * a.stiffness.quadratic(v) + c_tau * boundary;
}

CoercivityReport check_step_coercivity(const GalerkinSpace& space, const LinearOperatorA& a,
                                       const BoundaryFunctional& j, double tau,
                                       const std::vector<Vector>& samples) {
  if (samples.empty()) throw InvalidInput("check_step_coercivity: empty sample list");
  if (!(tau > 0.0)) throw InvalidInput("check_step_coercivity: tau must be positive");
  CoercivityReport rep;
  rep.tau = tau;
  auto fit = [&](double c_tau, double& c1, double& c2) {
    std::vector<double> pairing(samples.size()), vsq(samples.size());
    double min_pair = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      pairing[k] = worst_case_pairing(space, a, j, c_tau, samples[k]);
      const double vn = v_norm(space, samples[k]);
      vsq[k] = vn * vn;
      min_pair = std::min(min_pair, pairing[k]);
    }
    c2 = -min_pair;
    c1 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples.size(); ++k)
      if (vsq[k] > 0.0) c1 = std::min(c1, (pairing[k] + c2) / (c_tau * vsq[k]));
    if (!std::isfinite(c1)) c1 = 0.0;
  };
  fit(tau, rep.c1_first, rep.c2_first);
  fit((2.0 / 3.0) * tau, rep.c1_bdf2, rep.c2_bdf2);
  rep.flagged_first = !(rep.c1_first > 0.0);
  rep.flagged_bdf2 = !(rep.c1_bdf2 > 0.0);
  return rep;
}

std::vector<double> step_equation_residuals(const Problem& problem, const RotheTrajectory& traj) {
  const GalerkinSpace& space = problem.space;
  const double tau = traj.grid.tau;
  std::vector<double> out;
  for (int n = 1; n <= traj.grid.N; ++n) {
    const auto k = static_cast<std::size_t>(n);
    Vector diff;
    if (n == 1 || is_one_step(traj.scheme))
      diff = traj.u[k] - traj.u[k - 1];
    else
      diff = 1.5 * traj.u[k] - 2.0 * traj.u[k - 1] + 0.5 * traj.u[k - 2];
    Vector r = space.gram_h().apply(diff) / tau + problem.op.stiffness.apply(traj.u[k]) +
               space.apply_trace_transpose(problem.functional.weights.cwiseProduct(traj.xi[k - 1])) -
               traj.f_avg[k - 1].coeffs;
    out.push_back(dual_norm(space, DualVector(std::move(r))));
  }
  return out;
}

}  // namespace rothe
