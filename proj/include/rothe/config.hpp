#pragma once

// Experiment configuration: flat INI sections with typed keys. Parsing is
// strict (unknown sections and keys are errors); serialization emits every
// key in a fixed order so that serialize(parse(serialize(c))) is
// byte-identical. See docs/config.md for the schema.

#include <iosfwd>
#include <string>
#include <vector>

#include "rothe/inclusion_solver.hpp"
#include "rothe/potentials.hpp"
#include "rothe/presets.hpp"
#include "rothe/stepper.hpp"

namespace rothe {

struct ProblemConfig {
  int n_el = 32;
  double T_final = 1.0;
  /// paper_exponential | linear_robin | nonconvex_piecewise | zero
  std::string potential = "paper_exponential";
  double d = 1.0;
  double k = 1.0;
  bool paper_literal_subdiff = false;
  NonconvexPiecewise nonconvex{};
  presets::ForcingChoice forcing{"constant", {1.0}, {0.0}};
  presets::InitialChoice initial{"zero", {}};
  presets::OperatorOverrides constants{};
};

struct SchemeConfig {
  Scheme scheme = Scheme::BDF2;
  /// τ-ladder as step counts, τ = T/N
  std::vector<int> steps{8, 16, 32, 64, 128};
  int reference_steps = 4096;
};

struct CheckConfig {
  int samples = 1000;
  std::vector<double> coercivity_taus{0.1, 0.05, 0.01};
  int fuzz_triples = 10000;
};

struct ExperimentConfig {
  ProblemConfig problem;
  SchemeConfig scheme;
  SolverOptions solver;
  std::string output_dir = "out";
  CheckConfig check;
};

/// Throws ParseError with the offending line and key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::string serialize_config(const ExperimentConfig& cfg);

ScalarPotential make_potential(const ProblemConfig& p);
Problem make_problem(const ProblemConfig& p);

/// Full-precision decimal (17 significant digits).
std::string format_double(double v);

}  // namespace rothe
