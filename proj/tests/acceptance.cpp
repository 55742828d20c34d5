// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rothe/commands.hpp"
#include "rothe/config.hpp"
#include "rothe/diagnostics.hpp"
#include "rothe/errors.hpp"
#include "rothe/oracle.hpp"

using namespace rothe;

namespace {

const std::string kConfigs = std::string(ROTHE_SOURCE_DIR) + "/configs/";

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

int jobs() { return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency()))); }

bool report(int id, const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0) out.require(secs < budget_s, "runtime budget " + std::to_string(budget_s) + " s");
  std::printf("%s criterion %d (%s):%s; %.2f s\n", out.pass ? "PASS" : "FAIL", id, name.c_str(),
              out.detail.str().c_str(), secs);
  std::fflush(stdout);
  return out.pass;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<double> column(const LadderStudy& s, const std::function<double(const LadderRow&)>& f) {
  std::vector<double> v;
  for (const auto& r : s.rows) v.push_back(f(r));
  return v;
}

// Strictly decreasing with every successive ratio ≤ bound.
bool decreasing_by(const std::vector<double>& v, double bound) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1]) || !(v[i] <= bound * v[i - 1])) return false;
  return true;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt(x);
  return s;
}

// A = 0, j = 0 on one element with spatially constant forcing Σ coeffs[i] tⁱ.
Problem pure_ode(std::vector<double> coeffs, double u0) {
  const fem1d::Assembly a = fem1d::assemble_space(fem1d::Mesh1D(1));
  LinearOperatorA zero_op(SymmetricMatrix(Matrix::Zero(2, 2)), 1.0, 1.0, 0.0, 1.0);
  ForcingSource src = [a, coeffs](double t) {
    double f = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) f = f * t + coeffs[i];
    return DualVector(a.space.gram_h().apply(Vector::Constant(2, f)));
  };
  return Problem{a.space, zero_op, BoundaryFunctional(ScalarPotential::zero(), Vector::Ones(1)), src,
                 Vector::Constant(2, u0), 1.0};
}

double max_grid_error(const RotheTrajectory& tr, const std::function<double(double)>& exact) {
  double e = 0.0;
  for (int n = 0; n <= tr.grid.N; ++n)
    e = std::max(e, (tr.u[n].array() - exact(tr.grid.t(n))).abs().maxCoeff());
  return e;
}

struct Fixture {
  StepProblem p;
  double range;
};

// Random step inclusion with dim ∈ {1, 2} and one boundary node.
Fixture random_fixture(std::mt19937_64& rng, const ScalarPotential& pot) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const int dim = unit(rng) < 0.5 ? 1 : 2;
  Matrix m(dim, dim), k(dim, dim), tr = Matrix::Zero(1, dim);
  if (dim == 1) {
    m(0, 0) = 0.2 + 2.0 * unit(rng);
    k(0, 0) = 3.0 * unit(rng);
    tr(0, 0) = 0.5 + unit(rng);
  } else {
    Matrix b(2, 2);
    b << normal(rng), normal(rng), normal(rng), normal(rng);
    m = b.transpose() * b + 0.2 * Matrix::Identity(2, 2);
    m = (0.5 * (m + m.transpose())).eval();
    const double kappa = 3.0 * unit(rng);
    k << kappa, -kappa, -kappa, kappa;
    tr(0, unit(rng) < 0.5 ? 0 : 1) = 1.0;
  }
  const double w = 0.5 + 1.5 * unit(rng);
  const double tau = std::pow(10.0, -2.0 + 2.0 * unit(rng));
  const double c = unit(rng) < 0.5 ? 1.0 : 2.0 / 3.0;
  Vector b(dim);
  for (int i = 0; i < dim; ++i) b[i] = 3.0 * normal(rng);
  const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff();
  const double range = 20.0 + 5.0 * b.lpNorm<Eigen::Infinity>() / lmin;
  return {{make_step_operator(m, k, tr, Vector::Constant(1, w), pot, c, tau), b}, range};
}

}  // namespace

int main() {
  bool all = true;

  all &= report(1, "BDF2 identity and inequality on 10^4 fuzzed triples", 5.0, [](Outcome& o) {
    const IdentityFuzzReport r = identity_fuzz(10000, 20240601);
    o.detail << " worst relative gap " << fmt(r.worst_relative_gap) << ", worst slack " << fmt(r.worst_slack);
    o.require(r.triples == 10000, "triple count");
    o.require(r.worst_relative_gap <= 1e-12, "identity gap <= 1e-12 scale");
    o.require(r.worst_slack >= -1e-12, "inequality slack >= -1e-12");
  });

  all &= report(2, "exactness on polynomial-in-time solutions", 1.0, [](Outcome& o) {
    double bdf_lin = 0.0, bdf_quad = 0.0, be_lin = 0.0, be_quad = 0.0;
    for (int N : {2, 5, 16, 64}) {
      const Problem lin = pure_ode({0.7}, 0.25);
      const Problem quad = pure_ode({0.0, 1.0}, -1.0);
      const auto l = [](double t) { return 0.25 + 0.7 * t; };
      const auto q = [](double t) { return -1.0 + 0.5 * t * t; };
      bdf_lin = std::max(bdf_lin, max_grid_error(run_rothe(lin, TimeGrid(1.0, N), Scheme::BDF2), l));
      bdf_quad = std::max(bdf_quad, max_grid_error(run_rothe(quad, TimeGrid(1.0, N), Scheme::BDF2), q));
      be_lin = std::max(be_lin, max_grid_error(run_rothe(lin, TimeGrid(1.0, N), Scheme::BackwardEuler), l));
      be_quad = std::max(be_quad, max_grid_error(run_rothe(quad, TimeGrid(1.0, N), Scheme::BackwardEuler), q));
    }
    o.detail << " BDF2 linear " << fmt(bdf_lin) << ", quadratic " << fmt(bdf_quad) << "; backward Euler linear "
             << fmt(be_lin) << ", quadratic " << fmt(be_quad);
    o.require(bdf_lin <= 1e-12 && bdf_quad <= 1e-12, "BDF2 exact to 1e-12");
    o.require(be_lin <= 1e-12, "backward Euler exact on the linear case");
    o.require(be_quad > 1e-6, "backward Euler not exact on the quadratic case");
  });

  const ExperimentConfig smooth = load_config(kConfigs + "smooth_robin.ini");
  const Problem smooth_problem = make_problem(smooth.problem);
  LadderStudy smooth_bdf2;
  all &= report(3, "temporal order on the smooth Robin problem", 60.0, [&](Outcome& o) {
    o.require(smooth.problem.n_el == 64 && smooth.scheme.steps == std::vector<int>{8, 16, 32, 64, 128} &&
                  smooth.scheme.reference_steps == 4096,
              "configured ladder");
    const RotheTrajectory ref = oracle::reference_solution(smooth_problem, smooth.scheme.reference_steps);
    smooth_bdf2 = tau_ladder_study(smooth_problem, smooth.scheme.steps, Scheme::BDF2, smooth.solver, ref, jobs());
    const LadderStudy be =
        tau_ladder_study(smooth_problem, smooth.scheme.steps, Scheme::BackwardEuler, smooth.solver, ref, jobs());
    const double p2 = smooth_bdf2.fitted_order.value_or(NAN), p1 = be.fitted_order.value_or(NAN);
    o.detail << " fitted order BDF2 " << fmt(p2) << ", backward Euler " << fmt(p1);
    o.require(p2 >= 1.8 && p2 <= 2.2, "BDF2 order in [1.8, 2.2]");
    o.require(p1 >= 0.8 && p1 <= 1.2, "backward Euler order in [0.8, 1.2]");
  });

  const ExperimentConfig expo = load_config(kConfigs + "exponential_boundary.ini");
  const Problem expo_problem = make_problem(expo.problem);
  LadderStudy expo_study;
  all &= report(4, "nonsmooth run of the exponential boundary law", 120.0, [&](Outcome& o) {
    o.require(expo.problem.n_el == 64 && expo.scheme.steps == std::vector<int>{16, 32, 64, 128, 256},
              "configured ladder");
    const RotheTrajectory ref = oracle::reference_solution(expo_problem, expo.scheme.reference_steps);
    expo_study = tau_ladder_study(expo_problem, expo.scheme.steps, Scheme::BDF2, expo.solver, ref, jobs());
    const auto res = column(expo_study, [](const LadderRow& r) { return r.max_step_residual; });
    const auto slack = column(expo_study, [](const LadderRow& r) { return r.max_membership_slack; });
    const auto err = column(expo_study, [](const LadderRow& r) { return r.error_at_T.value_or(NAN); });
    const double worst_res = *std::max_element(res.begin(), res.end());
    const double worst_slack = *std::max_element(slack.begin(), slack.end());
    o.detail << " max residual " << fmt(worst_res) << ", max membership slack " << fmt(worst_slack)
             << ", errors " << list(err) << ", worst ratio " << fmt(max_successive_ratio(err));
    o.require(worst_res <= 1e-9, "per-step residuals <= 1e-9");
    o.require(worst_slack <= 1e-9, "Clarke membership within 1e-9");
    o.require(decreasing_by(err, 0.75), "errors decrease with ratio <= 0.75");
  });

  all &= report(5, "a-priori estimate stability along the ladder", 0.0, [&](Outcome& o) {
    o.require(!expo_study.rows.empty(), "criterion 4 ladder available");
    if (expo_study.rows.empty()) return;
    using Get = std::function<double(const LadderRow&)>;
    const std::vector<std::pair<std::string, Get>> two_sided{
        {"q3", [](const LadderRow& r) { return r.report.q3; }},
        {"q4", [](const LadderRow& r) { return r.report.q4; }},
        {"q5", [](const LadderRow& r) { return r.report.q5; }},
        {"q7", [](const LadderRow& r) { return r.report.q7; }}};
    for (const auto& [name, get] : two_sided) {
      const double s = spread_ratio(column(expo_study, get));
      o.detail << " " << name << " spread " << fmt(s) << ";";
      o.require(s <= 2.0, name + " varies by a factor <= 2");
    }
    // These two vanish as τ → 0 on this problem; their bound is that they
    // never grow by more than 2 over the coarsest value and keep decreasing.
    const std::vector<std::pair<std::string, Get>> vanishing{
        {"q6", [](const LadderRow& r) { return r.report.q6; }},
        {"q75", [](const LadderRow& r) { return r.report.q75; }}};
    for (const auto& [name, get] : vanishing) {
      const auto v = column(expo_study, get);
      o.detail << " " << name << " " << list(v) << " (spread " << fmt(spread_ratio(v)) << ", growth "
               << fmt(growth_ratio(v)) << ");";
      o.require(growth_ratio(v) <= 2.0, name + " bounded by 2x its coarsest value");
      o.require(decreasing_by(v, 1.0), name + " nonincreasing");
    }
    const auto gap = column(expo_study, [](const LadderRow& r) { return r.report.gap_quadrature; });
    o.detail << " gap_quadrature worst ratio " << fmt(max_successive_ratio(gap));
    o.require(decreasing_by(gap, 0.75), "gap_quadrature decreases with ratio <= 0.75");
  });

  all &= report(6, "first-step increment vanishes", 0.0, [&](Outcome& o) {
    for (const auto* s : {&smooth_bdf2, &expo_study}) {
      const auto v = column(*s, [](const LadderRow& r) { return r.report.u1_u0_gap; });
      o.require(v.size() >= 2, "ladder available");
      o.detail << " worst ratio " << fmt(max_successive_ratio(v)) << (s == &smooth_bdf2 ? " (smooth);" : " (nonsmooth)");
      o.require(decreasing_by(v, 0.75), "|u1 - u0|_H decreases with ratio <= 0.75");
    }
  });

  all &= report(7, "step solver agrees with brute-force oracles", 30.0, [](Outcome& o) {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<std::pair<std::string, std::function<ScalarPotential()>>> kinds{
        {"paper_exponential", [&] { return ScalarPotential::paper_exponential(0.5 + 1.5 * unit(rng)); }},
        {"paper_exponential_literal",
         [&] { return ScalarPotential::paper_exponential(0.5 + 1.5 * unit(rng), true); }},
        {"linear_robin", [&] { return ScalarPotential::linear_robin(0.1 + 3.0 * unit(rng)); }},
        {"nonconvex_piecewise",
         [&] {
           return ScalarPotential(NonconvexPiecewise{0.5 + unit(rng), unit(rng) - 0.5, 0.5 * unit(rng),
                                                     1.0 + 4.0 * unit(rng), 0.2 + 0.6 * unit(rng)});
         }},
        {"zero", [] { return ScalarPotential::zero(); }}};
    for (const auto& [name, make] : kinds) {
      double worst = 0.0;
      for (int i = 0; i < 200; ++i) {
        const Fixture fx = random_fixture(rng, make());
        const Vector u = solve_step_inclusion(fx.p, Vector::Zero(fx.p.op->dim())).u;
        double best = INFINITY;
        const int grid = std::max(20000, static_cast<int>(2000.0 * fx.range));
        if (fx.p.op->dim() == 1) {
          for (double r : oracle::scan_roots_1d(fx.p, -fx.range, fx.range, grid)) best = std::min(best, std::abs(u[0] - r));
        } else {
          for (const auto& r : oracle::scan_roots_single_boundary(fx.p, -fx.range, fx.range, grid))
            best = std::min(best, (u - r.u).lpNorm<Eigen::Infinity>());
        }
        worst = std::max(worst, best);
      }
      o.detail << " " << name << " " << fmt(worst) << ";";
      o.require(worst <= 1e-7, name + " within 1e-7 of an oracle root");
    }
    double worst_energy = 0.0;
    for (int i = 0; i < 100; ++i) {
      const ScalarPotential pot = i % 3 == 0   ? ScalarPotential::paper_exponential(0.5 + 1.5 * unit(rng))
                                  : i % 3 == 1 ? ScalarPotential::linear_robin(0.1 + 3.0 * unit(rng))
                                               : ScalarPotential::zero();
      const Fixture fx = random_fixture(rng, pot);
      const Vector u = solve_step_inclusion(fx.p, Vector::Zero(fx.p.op->dim())).u;
      worst_energy = std::max(worst_energy, (u - oracle::minimize_energy_convex(fx.p)).lpNorm<Eigen::Infinity>());
    }
    o.detail << " energy minimizer " << fmt(worst_energy);
    o.require(worst_energy <= 1e-6, "convex fixtures agree with the energy minimizer within 1e-6");
  });

  all &= report(8, "hypothesis suite", 10.0, [](Outcome& o) {
    const auto dir = std::filesystem::temp_directory_path() / "rothe_hvi_acceptance";
    std::filesystem::remove_all(dir);
    cli::CommandOptions opts;
    opts.quiet = true;
    opts.out_dir = (dir / "exponential").string();
    const int good = cli::cmd_check(load_config(kConfigs + "exponential_boundary.ini"), opts);
    opts.out_dir = (dir / "alpha10").string();
    const int bad = cli::cmd_check(load_config(kConfigs + "alpha10_negative.ini"), opts);
    o.detail << " exit codes: exponential boundary example " << good << ", alpha = 10 control " << bad;
    o.require(good == 0, "passes on the exponential boundary example");
    o.require(bad != 0, "fails on the alpha = 10 control");
  });

  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
