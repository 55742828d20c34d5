#include "rothe/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "rothe/errors.hpp"

namespace rothe {

namespace {

constexpr std::array<double, 5> kNodes = {-0.9061798459386639928, -0.5384693101056830910, 0.0,
                                          0.5384693101056830910, 0.9061798459386639928};
constexpr std::array<double, 5> kWeights = {0.2369268850561890875, 0.4786286704993664680,
                                            0.5688888888888888889, 0.4786286704993664680,
                                            0.2369268850561890875};

void require_same(const GalerkinSpace& space, const Vector& a, const Vector& b, const Vector& c) {
  if (a.size() != space.dim() || b.size() != space.dim() || c.size() != space.dim())
    throw InvalidInput("dimension mismatch");
}

double hsq(const GalerkinSpace& space, const Vector& v) { return space.gram_h().quadratic(v); }

double dual_sq(const GalerkinSpace& space, const Vector& v) {
  const double n = dual_norm_of_h(space, v);
  return n * n;
}

Vector bdf2_difference(const RotheTrajectory& traj, std::size_t n) {
  return 1.5 * traj.u[n] - 2.0 * traj.u[n - 1] + 0.5 * traj.u[n - 2];
}

Vector second_difference(const RotheTrajectory& traj, std::size_t n) {
  return traj.u[n] - 2.0 * traj.u[n - 1] + traj.u[n - 2];
}

}  // namespace

double bdf2_identity_gap(const GalerkinSpace& space, const Vector& a, const Vector& b, const Vector& c) {
  require_same(space, a, b, c);
  const double lhs = space.gram_h().bilinear(1.5 * a - 2.0 * b + 0.5 * c, a);
  const double rhs = 0.25 * (hsq(space, a) + hsq(space, 2.0 * a - b) - hsq(space, b) - hsq(space, 2.0 * b - c) +
                             hsq(space, a - 2.0 * b + c));
  return std::abs(lhs - rhs);
}

double bdf2_inequality_slack(const GalerkinSpace& space, const Vector& a, const Vector& b, const Vector& c) {
  require_same(space, a, b, c);
  return space.gram_h().bilinear(1.5 * a - 2.0 * b + 0.5 * c, a - 2.0 * b + c) - 0.5 * hsq(space, a - b) +
         0.5 * hsq(space, b - c);
}

IdentityFuzzReport identity_fuzz(int triples, std::uint64_t seed) {
  if (triples < 1) throw InvalidInput("identity_fuzz: need at least one triple");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> dim_dist(1, 16);
  IdentityFuzzReport rep;
  rep.triples = triples;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < triples; ++k) {
    const int d = dim_dist(rng);
    Matrix b(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) b(i, j) = normal(rng);
    Matrix gram_h = b.transpose() * b + 0.1 * Matrix::Identity(d, d);
    gram_h = 0.5 * (gram_h + gram_h.transpose()).eval();
    Matrix trace = Matrix::Zero(1, d);
    trace(0, 0) = 1.0;
    const GalerkinSpace space(gram_h, gram_h + Matrix::Identity(d, d), trace, Matrix::Identity(1, 1));
    auto draw = [&] {
      Vector v(d);
      for (int i = 0; i < d; ++i) v[i] = normal(rng);
      return v;
    };
    const Vector x = draw(), y = draw(), z = draw();
    const double scale = std::max(1.0, hsq(space, x) + hsq(space, y) + hsq(space, z));
    rep.worst_relative_gap = std::max(rep.worst_relative_gap, bdf2_identity_gap(space, x, y, z) / scale);
    rep.worst_slack = std::min(rep.worst_slack, bdf2_inequality_slack(space, x, y, z));
  }
  return rep;
}

Interpolants::Interpolants(const RotheTrajectory& traj) : traj_(&traj) {
  if (traj.u.size() != static_cast<std::size_t>(traj.grid.N) + 1 ||
      traj.xi.size() != static_cast<std::size_t>(traj.grid.N))
    throw InvalidInput("Interpolants: trajectory is incomplete");
}

int Interpolants::interval_of(double t) const {
  const auto& g = traj_->grid;
  if (!(t >= 0.0) || t > g.T_final * (1.0 + 1e-14)) throw InvalidInput("Interpolants: t outside [0, T]");
  if (t == 0.0) return 1;
  int n = static_cast<int>(std::ceil(t / g.tau - 1e-12));
  return std::clamp(n, 1, g.N);
}

Vector Interpolants::piecewise_constant(double t) const {
  const int n = interval_of(t);
  if (t == 0.0) return traj_->u[0];
  return traj_->u[static_cast<std::size_t>(n)];
}

Vector Interpolants::linear_branch(int n, double t) const {
  const auto& u = traj_->u;
  const double tau = traj_->grid.tau;
  if (n < 1 || n > traj_->grid.N) throw InvalidInput("Interpolants: branch index out of range");
  if (n == 1) return 1.5 * u[1] - 0.5 * u[0] + (u[1] - u[0]) * ((t - tau) / tau);
  const auto k = static_cast<std::size_t>(n);
  return 1.5 * u[k] - 0.5 * u[k - 1] + bdf2_difference(*traj_, k) * ((t - n * tau) / tau);
}

Vector Interpolants::piecewise_linear(double t) const { return linear_branch(interval_of(t), t); }

Vector Interpolants::derivative(double t) const {
  const int n = interval_of(t);
  const double tau = traj_->grid.tau;
  const auto k = static_cast<std::size_t>(n);
  if (n == 1) return (traj_->u[1] - traj_->u[0]) / tau;
  return bdf2_difference(*traj_, k) / tau;
}

Vector Interpolants::xi_bar(double t) const {
  return traj_->xi[static_cast<std::size_t>(interval_of(t)) - 1];
}

DualVector Interpolants::f_bar(double t) const {
  return traj_->f_avg[static_cast<std::size_t>(interval_of(t)) - 1];
}

EstimateReport estimate_report(const RotheTrajectory& traj, const GalerkinSpace& space) {
  const Interpolants interp(traj);
  const double tau = traj.grid.tau;
  const auto N = static_cast<std::size_t>(traj.grid.N);
  EstimateReport r;
  for (std::size_t n = 0; n <= N; ++n) {
    const Norms nm = norms(space, traj.u[n]);
    r.q3 += tau * nm.v_norm * nm.v_norm;
    r.q4 = std::max(r.q4, nm.h_norm);
  }
  for (std::size_t n = 1; n <= N; ++n) {
    const Vector& xi = traj.xi[n - 1];
    r.q5 += tau * xi.dot(space.gram_u() * xi);
  }
  const Vector d1 = traj.u[1] - traj.u[0];
  r.q6 = tau * dual_sq(space, d1 / tau);
  double bdf_sum = 0.0;
  double sd_sum = 0.0;
  for (std::size_t n = 2; n <= N; ++n) {
    const double dsq = dual_sq(space, bdf2_difference(traj, n));
    r.q7 += tau * dsq / (tau * tau);
    bdf_sum += dsq;
    const double s = hsq(space, second_difference(traj, n));
    r.q75 += s;
    sd_sum += s;
  }
  const double trace_norm = trace_operator_norm(space);
  r.gap_closed_form = tau / 12.0 * dual_sq(space, d1) + tau / 6.0 * bdf_sum + 0.125 * trace_norm * tau * sd_sum;

  for (std::size_t n = 1; n <= N; ++n) {
    const double a = (static_cast<double>(n) - 1.0) * tau;
    const double mid = a + 0.5 * tau;
    for (std::size_t q = 0; q < kNodes.size(); ++q) {
      const double t = mid + 0.5 * tau * kNodes[q];
      const Vector diff = interp.piecewise_linear(t) - interp.piecewise_constant(t);
      r.gap_quadrature += 0.5 * tau * kWeights[q] * dual_sq(space, diff);
    }
  }
  r.u1_u0_gap = std::sqrt(std::max(0.0, hsq(space, d1)));
  double bv = 0.0;
  for (std::size_t n = 1; n <= N; ++n) bv += tau * dual_sq(space, (traj.u[n] - traj.u[n - 1]) / tau);
  r.bv_bound = traj.grid.T_final * bv;
  return r;
}

double interpolant_gap_closed_form(const RotheTrajectory& traj, const GalerkinSpace& space, double t) {
  const Interpolants interp(traj);
  const int n = interp.interval_of(t);
  const double tau = traj.grid.tau;
  if (n == 1) return dual_norm_of_h(space, (traj.u[1] - traj.u[0]) * ((t - 0.5 * tau) / tau));
  const auto k = static_cast<std::size_t>(n);
  const Vector v = bdf2_difference(traj, k) * ((t - (n - 0.5) * tau) / tau) - 0.25 * second_difference(traj, k);
  return dual_norm_of_h(space, v);
}

double interpolant_equation_residual(const Problem& problem, const RotheTrajectory& traj, double t) {
  const Interpolants interp(traj);
  const GalerkinSpace& space = problem.space;
  Vector r = space.gram_h().apply(interp.derivative(t)) +
             problem.op.stiffness.apply(interp.piecewise_constant(t)) +
             space.apply_trace_transpose(problem.functional.weights.cwiseProduct(interp.xi_bar(t))) -
             interp.f_bar(t).coeffs;
  return dual_norm(space, DualVector(std::move(r)));
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("fit_loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidInput("fit_loglog_slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double spread_ratio(const std::vector<double>& values) {
  if (values.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi == 0.0) return 1.0;
  if (*lo <= 0.0) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

double growth_ratio(const std::vector<double>& values) {
  if (values.empty()) return 1.0;
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi == 0.0) return 1.0;
  if (values.front() <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / values.front();
}

double max_successive_ratio(const std::vector<double>& values) {
  double worst = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i - 1] == 0.0) {
      if (values[i] != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, values[i] / values[i - 1]);
  }
  return worst;
}

LadderStudy tau_ladder_study(const Problem& problem, const std::vector<int>& steps, Scheme scheme,
                             const SolverOptions& opts, const std::optional<RotheTrajectory>& reference,
                             int jobs) {
  if (steps.empty()) throw InvalidInput("tau_ladder_study: empty ladder");
  for (std::size_t i = 1; i < steps.size(); ++i)
    if (steps[i] <= steps[i - 1]) throw InvalidInput("tau_ladder_study: taus must be decreasing");
  if (reference && std::abs(reference->grid.T_final - problem.T_final) > 1e-14 * problem.T_final)
    throw InvalidInput("tau_ladder_study: reference has a different final time");

  LadderStudy study;
  study.scheme = scheme;
  study.rows.resize(steps.size());
  std::vector<std::exception_ptr> errors(steps.size());

  auto run_row = [&](std::size_t i) {
    try {
      const TimeGrid grid(problem.T_final, steps[i]);
      const RotheTrajectory traj = run_rothe(problem, grid, scheme, opts);
      LadderRow& row = study.rows[i];
      row.N = steps[i];
      row.tau = grid.tau;
      row.report = estimate_report(traj, problem.space);
      for (double r : traj.per_step_residuals) row.max_step_residual = std::max(row.max_step_residual, r);
      for (double m : traj.membership_slacks) row.max_membership_slack = std::max(row.max_membership_slack, m);
      if (reference) row.error_at_T = h_norm(problem.space, traj.u.back() - reference->u.back());
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const std::size_t workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1) {
    for (std::size_t i = 0; i < steps.size(); ++i) run_row(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, steps.size()); ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < steps.size(); i = next++) run_row(i);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (reference && steps.size() >= 2) {
    std::vector<double> taus, errs;
    for (const auto& row : study.rows) {
      taus.push_back(row.tau);
      errs.push_back(*row.error_at_T);
    }
    if (std::all_of(errs.begin(), errs.end(), [](double e) { return e > 0.0; }))
      study.fitted_order = fit_loglog_slope(taus, errs);
  }
  return study;
}

}  // namespace rothe
