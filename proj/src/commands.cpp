#include "rothe/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>

#include "rothe/csv.hpp"
#include "rothe/diagnostics.hpp"
#include "rothe/errors.hpp"
#include "rothe/oracle.hpp"

namespace fs = std::filesystem;

namespace rothe::cli {

namespace {

using csv::cell;

// Free text goes into a CSV cell: no commas or newlines.
std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

class Summary {
 public:
  explicit Summary(std::string dir) : dir_(std::move(dir)) {
    table_.schema = "summary";
    table_.columns = {"command", "item", "status", "value", "detail"};
  }
  void add(const std::string& command, const std::string& item, bool pass, double value, const std::string& detail) {
    table_.add_row({command, item, pass ? "PASS" : "FAIL", cell(value), sanitize(detail)});
    all_pass_ = all_pass_ && pass;
  }
  bool all_pass() const { return all_pass_; }
  void write(bool finalize) const { csv::write(table_, (fs::path(dir_) / "summary.csv").string(), finalize); }

 private:
  std::string dir_;
  csv::Table table_;
  bool all_pass_ = true;
};

void log(const CommandOptions& opts, const std::string& msg) {
  if (!opts.quiet) std::cerr << msg << "\n";
}

std::string prepare_dir(const ExperimentConfig& cfg, const CommandOptions& opts) {
  const std::string dir = resolve_output_dir(cfg, opts);
  fs::create_directories(fs::path(dir) / "plot");
  return dir;
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

csv::Table trajectory_table(const RotheTrajectory& traj) {
  csv::Table t;
  t.schema = "trajectory";
  const auto dim = traj.u.front().size();
  const auto bdim = traj.xi.empty() ? 0 : traj.xi.front().size();
  t.columns.push_back("t");
  for (Eigen::Index i = 0; i < dim; ++i) t.columns.push_back("u_" + std::to_string(i));
  for (Eigen::Index i = 0; i < bdim; ++i) t.columns.push_back("xi_" + std::to_string(i));
  t.columns.insert(t.columns.end(), {"residual", "membership_slack", "iterations"});
  for (int n = 0; n <= traj.grid.N; ++n) {
    std::vector<std::string> row{cell(traj.grid.t(n))};
    for (Eigen::Index i = 0; i < dim; ++i) row.push_back(cell(traj.u[n][i]));
    // the row for t = 0 carries no multiplier; it is written as zeros
    for (Eigen::Index i = 0; i < bdim; ++i) row.push_back(cell(n == 0 ? 0.0 : traj.xi[n - 1][i]));
    row.push_back(cell(n == 0 ? 0.0 : traj.per_step_residuals[n - 1]));
    row.push_back(cell(n == 0 ? 0.0 : traj.membership_slacks[n - 1]));
    row.push_back(cell(n == 0 ? 0 : traj.iterations[n - 1]));
    t.add_row(std::move(row));
  }
  return t;
}

const std::vector<std::string> kEstimateColumns = {"scheme", "N", "tau", "q3", "q4", "q5", "q6", "q7", "q75",
                                                   "gap_closed_form", "gap_quadrature", "u1_u0_gap", "bv_bound",
                                                   "error_at_T", "max_step_residual", "max_membership_slack"};

std::vector<std::string> estimate_row(Scheme scheme, const LadderRow& r) {
  const auto& q = r.report;
  return {scheme_name(scheme), cell(r.N), cell(r.tau), cell(q.q3), cell(q.q4), cell(q.q5), cell(q.q6),
          cell(q.q7), cell(q.q75), cell(q.gap_closed_form), cell(q.gap_quadrature), cell(q.u1_u0_gap),
          cell(q.bv_bound), cell(r.error_at_T.value_or(std::nan(""))), cell(r.max_step_residual),
          cell(r.max_membership_slack)};
}

void write_series(const std::string& path, const std::vector<double>& x, const std::vector<double>& y) {
  std::ofstream out(path, std::ios::trunc);
  out << "# schema_version=" << csv::kSchemaVersion << " columns=tau,value\n";
  for (std::size_t i = 0; i < x.size(); ++i) out << cell(x[i]) << " " << cell(y[i]) << "\n";
}

void write_plot_data(const std::string& dir, const LadderStudy& study, std::vector<std::string>& files) {
  const std::string tag = scheme_name(study.scheme);
  std::vector<double> tau;
  for (const auto& r : study.rows) tau.push_back(r.tau);
  auto series = [&](const std::string& name, auto get) {
    std::vector<double> y;
    for (const auto& r : study.rows) y.push_back(get(r));
    const std::string file = name + "_" + tag + ".dat";
    write_series(path_in(path_in(dir, "plot"), file), tau, y);
    files.push_back(file);
  };
  if (study.rows.front().error_at_T) series("error_at_T", [](const LadderRow& r) { return *r.error_at_T; });
  series("gap_quadrature", [](const LadderRow& r) { return r.report.gap_quadrature; });
  series("u1_u0_gap", [](const LadderRow& r) { return r.report.u1_u0_gap; });
  series("q3", [](const LadderRow& r) { return r.report.q3; });
  series("q4", [](const LadderRow& r) { return r.report.q4; });
  series("q5", [](const LadderRow& r) { return r.report.q5; });
  series("q6", [](const LadderRow& r) { return r.report.q6; });
  series("q7", [](const LadderRow& r) { return r.report.q7; });
  series("q75", [](const LadderRow& r) { return r.report.q75; });
}

void write_gnuplot_stub(const std::string& dir, const std::vector<std::string>& files) {
  std::ofstream out(path_in(path_in(dir, "plot"), "plot.gp"), std::ios::trunc);
  out << "# gnuplot -persist plot.gp\n"
      << "set logscale xy\nset xlabel 'tau'\nset key left top\n";
  for (std::size_t i = 0; i < files.size(); ++i)
    out << (i == 0 ? "plot " : "     ") << "'" << files[i] << "' using 1:2 with linespoints title '"
        << files[i].substr(0, files[i].size() - 4) << "'" << (i + 1 < files.size() ? ", \\" : "") << "\n";
}

std::optional<RotheTrajectory> make_reference(const Problem& problem, const ExperimentConfig& cfg,
                                              const CommandOptions& opts) {
  const int finest = *std::max_element(cfg.scheme.steps.begin(), cfg.scheme.steps.end());
  if (cfg.scheme.reference_steps < 16 * finest)
    throw InvalidInput("reference_steps must be at least 16 times the finest ladder entry");
  log(opts, "reference: BDF2 with N = " + std::to_string(cfg.scheme.reference_steps));
  return oracle::reference_solution(problem, cfg.scheme.reference_steps, Scheme::BDF2);
}

csv::Table order_table(const std::vector<LadderStudy>& studies) {
  csv::Table t;
  t.schema = "order";
  t.columns = {"scheme", "N", "tau", "error_at_T", "successive_order", "fitted_order"};
  for (const auto& s : studies) {
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      const auto& r = s.rows[i];
      double successive = std::nan("");
      if (i > 0 && r.error_at_T && s.rows[i - 1].error_at_T && *r.error_at_T > 0.0)
        successive = std::log(*s.rows[i - 1].error_at_T / *r.error_at_T) / std::log(s.rows[i - 1].tau / r.tau);
      t.add_row({scheme_name(s.scheme), cell(r.N), cell(r.tau), cell(r.error_at_T.value_or(std::nan(""))),
                 cell(successive), cell(s.fitted_order.value_or(std::nan("")))});
    }
  }
  return t;
}

template <class Body>
int guarded(const std::string& command, const ExperimentConfig& cfg, const CommandOptions& opts, Body body) {
  const std::string dir = prepare_dir(cfg, opts);
  Summary summary(dir);
  try {
    body(dir, summary);
  } catch (const StepFailure& e) {
    summary.add(command, "step_" + std::to_string(e.step_index), false, std::nan(""), e.what());
    summary.write(false);
    log(opts, std::string("error: ") + e.what());
    return 1;
  } catch (const Error& e) {
    summary.add(command, "error", false, std::nan(""), e.what());
    summary.write(false);
    log(opts, std::string("error: ") + e.what());
    return 1;
  }
  summary.write(true);
  return summary.all_pass() ? 0 : 1;
}

Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> log_scale(-2.0, 2.0);
  const double s = std::pow(10.0, log_scale(rng));
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = s * normal(rng);
  return v;
}

}  // namespace

std::string resolve_output_dir(const ExperimentConfig& cfg, const CommandOptions& opts) {
  if (opts.out_dir) return *opts.out_dir;
  if (const char* env = std::getenv("ROTHE_HVI_OUT"); env && *env) return env;
  return cfg.output_dir;
}

int cmd_run(const ExperimentConfig& cfg, const CommandOptions& opts) {
  return guarded("run", cfg, opts, [&](const std::string& dir, Summary& summary) {
    const Problem problem = make_problem(cfg.problem);
    const TimeGrid grid(cfg.problem.T_final, cfg.scheme.steps.front());
    log(opts, "run: " + scheme_name(cfg.scheme.scheme) + " with N = " + std::to_string(grid.N));
    const RotheTrajectory traj = run_rothe(problem, grid, cfg.scheme.scheme, cfg.solver);
    csv::write(trajectory_table(traj), path_in(dir, "trajectory.csv"));

    LadderRow row;
    row.N = grid.N;
    row.tau = grid.tau;
    row.report = estimate_report(traj, problem.space);
    for (double r : traj.per_step_residuals) row.max_step_residual = std::max(row.max_step_residual, r);
    for (double s : traj.membership_slacks) row.max_membership_slack = std::max(row.max_membership_slack, s);
    csv::Table est;
    est.schema = "estimates";
    est.columns = kEstimateColumns;
    est.add_row(estimate_row(traj.scheme, row));
    csv::write(est, path_in(dir, "estimates.csv"));

    summary.add("run", "step_residuals", row.max_step_residual <= cfg.solver.tol, row.max_step_residual,
                "max per-step V* residual");
    summary.add("run", "membership", row.max_membership_slack <= cfg.solver.tol_membership,
                row.max_membership_slack, "max Clarke membership slack");
  });
}

int cmd_study(const ExperimentConfig& cfg, const CommandOptions& opts) {
  return guarded("study", cfg, opts, [&](const std::string& dir, Summary& summary) {
    const Problem problem = make_problem(cfg.problem);
    const auto reference = make_reference(problem, cfg, opts);
    log(opts, "study: " + scheme_name(cfg.scheme.scheme) + " ladder");
    const LadderStudy study =
        tau_ladder_study(problem, cfg.scheme.steps, cfg.scheme.scheme, cfg.solver, reference, opts.jobs);

    csv::Table ladder;
    ladder.schema = "estimates";
    ladder.columns = kEstimateColumns;
    for (const auto& r : study.rows) ladder.add_row(estimate_row(study.scheme, r));
    csv::write(ladder, path_in(dir, "ladder.csv"));
    csv::write(order_table({study}), path_in(dir, "order.csv"));
    std::vector<std::string> files;
    write_plot_data(dir, study, files);
    write_gnuplot_stub(dir, files);

    // the same ladder against a backward Euler reference at the same fine step
    log(opts, "reference: backward_euler with N = " + std::to_string(cfg.scheme.reference_steps));
    const RotheTrajectory be_ref =
        oracle::reference_solution(problem, cfg.scheme.reference_steps, Scheme::BackwardEuler);
    const LadderStudy vs_be =
        tau_ladder_study(problem, cfg.scheme.steps, cfg.scheme.scheme, cfg.solver, be_ref, opts.jobs);
    csv::Table refs;
    refs.schema = "reference";
    refs.columns = {"scheme", "N", "tau", "error_vs_bdf2_reference", "error_vs_backward_euler_reference"};
    for (std::size_t i = 0; i < study.rows.size(); ++i)
      refs.add_row({scheme_name(study.scheme), cell(study.rows[i].N), cell(study.rows[i].tau),
                    cell(*study.rows[i].error_at_T), cell(*vs_be.rows[i].error_at_T)});
    csv::write(refs, path_in(dir, "reference.csv"));
    const double ref_gap = h_norm(problem.space, reference->u.back() - be_ref.u.back());
    summary.add("study", "reference_gap", true, ref_gap, "|u_ref_bdf2(T) - u_ref_backward_euler(T)|_H");
    const double be_order = vs_be.fitted_order.value_or(std::nan(""));
    summary.add("study", "fitted_order_vs_backward_euler_reference", std::isfinite(be_order), be_order,
                "same ladder; backward Euler reference");

    const double order = study.fitted_order.value_or(std::nan(""));
    summary.add("study", "fitted_order_" + scheme_name(study.scheme), std::isfinite(order), order,
                "least-squares slope of log error vs log tau");
    double worst = 0.0;
    for (const auto& r : study.rows) worst = std::max(worst, r.max_step_residual);
    summary.add("study", "step_residuals", worst <= cfg.solver.tol, worst, "max per-step V* residual");
  });
}

int cmd_compare(const ExperimentConfig& cfg, const CommandOptions& opts) {
  return guarded("compare", cfg, opts, [&](const std::string& dir, Summary& summary) {
    const Problem problem = make_problem(cfg.problem);
    const auto reference = make_reference(problem, cfg, opts);
    std::vector<LadderStudy> studies;
    for (Scheme s : {Scheme::BDF2, Scheme::BackwardEuler}) {
      log(opts, "compare: " + scheme_name(s) + " ladder");
      studies.push_back(tau_ladder_study(problem, cfg.scheme.steps, s, cfg.solver, reference, opts.jobs));
    }
    csv::Table side;
    side.schema = "compare";
    side.columns = {"N", "tau", "error_bdf2", "error_backward_euler"};
    for (std::size_t i = 0; i < studies[0].rows.size(); ++i)
      side.add_row({cell(studies[0].rows[i].N), cell(studies[0].rows[i].tau),
                    cell(*studies[0].rows[i].error_at_T), cell(*studies[1].rows[i].error_at_T)});
    csv::write(side, path_in(dir, "compare.csv"));
    csv::write(order_table(studies), path_in(dir, "order.csv"));
    std::vector<std::string> files;
    for (const auto& s : studies) write_plot_data(dir, s, files);
    write_gnuplot_stub(dir, files);
    for (const auto& s : studies) {
      const double order = s.fitted_order.value_or(std::nan(""));
      summary.add("compare", "fitted_order_" + scheme_name(s.scheme), std::isfinite(order), order,
                  "least-squares slope of log error vs log tau");
    }
  });
}

int cmd_check(const ExperimentConfig& cfg, const CommandOptions& opts) {
  return guarded("check", cfg, opts, [&](const std::string&, Summary& summary) {
    const Problem problem = make_problem(cfg.problem);
    std::mt19937_64 rng(opts.seed);
    std::vector<Vector> samples;
    for (int i = 0; i < cfg.check.samples; ++i) samples.push_back(random_vector(rng, problem.space.dim()));

    const HypothesisReportA ha = check_hypotheses_A(problem.space, problem.op, samples);
    summary.add("check", "A_coercivity", ha.coercivity_violations == 0, ha.coercivity_worst_slack,
                std::to_string(ha.coercivity_violations) + " violations of <Av;v> >= alpha|v|_V^2 - beta|v|_H^2");
    summary.add("check", "A_growth", ha.growth_violations == 0, ha.growth_worst_slack,
                std::to_string(ha.growth_violations) + " violations of |Av|_V* <= a + b|v|_V");
    summary.add("check", "embedding", problem.space.v_norm_dominates_h_norm(), 0.0, "|v|_H <= |v|_V");

    std::vector<double> s_samples;
    std::uniform_real_distribution<double> s_dist(-50.0, 50.0);
    for (int i = 0; i < cfg.check.samples; ++i) s_samples.push_back(s_dist(rng));
    std::vector<ScalarPotential> pots{make_potential(cfg.problem),
                                      ScalarPotential::paper_exponential(cfg.problem.d),
                                      ScalarPotential(cfg.problem.nonconvex)};
    std::set<std::string> seen;
    for (const auto& pot : pots) {
      if (!seen.insert(pot.name()).second) continue;
      std::vector<double> ss = s_samples;
      for (const auto& k : pot.kinks()) ss.push_back(k.at);
      const GrowthReport g = check_growth(pot, ss, problem.functional.measure());
      summary.add("check", "growth_" + pot.name(), g.ok(), g.worst_slack,
                  std::to_string(g.violations) + " violations of |dj(s)| <= d_j(1+|s|)");
    }

    for (double tau : cfg.check.coercivity_taus) {
      const CoercivityReport c =
          check_step_coercivity(problem.space, problem.op, problem.functional, tau, samples);
      summary.add("check", "coercivity_first_tau=" + format_double(tau), !c.flagged_first, c.c1_first,
                  "fitted c1 with c2 = " + format_double(c.c2_first + 0.0));
      summary.add("check", "coercivity_bdf2_tau=" + format_double(tau), !c.flagged_bdf2, c.c1_bdf2,
                  "fitted c1 with c2 = " + format_double(c.c2_bdf2 + 0.0));
    }

    const IdentityFuzzReport fz = identity_fuzz(cfg.check.fuzz_triples, opts.seed);
    summary.add("check", "bdf2_identity", fz.worst_relative_gap <= 1e-12, fz.worst_relative_gap,
                std::to_string(fz.triples) + " random triples; gap relative to |a|^2+|b|^2+|c|^2");
    summary.add("check", "bdf2_inequality", fz.worst_slack >= -1e-12, fz.worst_slack,
                std::to_string(fz.triples) + " random triples");
    log(opts, summary.all_pass() ? "check: all PASS" : "check: violations found");
  });
}

}  // namespace rothe::cli
