#include "rothe/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rothe/errors.hpp"

namespace rothe {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line;
};

[[noreturn]] void fail(const std::string& msg, int line, const std::string& key) {
  std::ostringstream os;
  os << "config line " << line << ", key '" << key << "': " << msg;
  throw ParseError(os.str(), line, key);
}

double to_double(const Entry& e, const std::string& key) {
  const std::string v = trim(e.value);
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d))
    fail("expected a finite real, got '" + v + "'", e.line, key);
  return d;
}

int to_int(const Entry& e, const std::string& key) {
  const std::string v = trim(e.value);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    fail("expected an integer, got '" + v + "'", e.line, key);
  return out;
}

bool to_bool(const Entry& e, const std::string& key) {
  const std::string v = trim(e.value);
  if (v == "true") return true;
  if (v == "false") return false;
  fail("expected true or false, got '" + v + "'", e.line, key);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> to_doubles(const Entry& e, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) out.push_back(to_double({item, e.line}, key));
  return out;
}

std::vector<int> to_ints(const Entry& e, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : split_list(e.value)) out.push_back(to_int({item, e.line}, key));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, Entry> entries;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header", line_no, line);
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"problem", "scheme", "solver", "output", "check"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok) fail("unknown section", line_no, section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value", line_no, line);
    if (section.empty()) fail("key outside of any section", line_no, trim(line.substr(0, eq)));
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (entries.count(key)) fail("duplicate key", line_no, key);
    entries[key] = {trim(line.substr(eq + 1)), line_no};
  }

  ExperimentConfig cfg;
  using Setter = std::function<void(const Entry&, const std::string&)>;
  std::map<std::string, Setter> setters = {
      {"problem.n_el", [&](auto& e, auto& k) { cfg.problem.n_el = to_int(e, k); }},
      {"problem.T_final", [&](auto& e, auto& k) { cfg.problem.T_final = to_double(e, k); }},
      {"problem.potential", [&](auto& e, auto&) { cfg.problem.potential = e.value; }},
      {"problem.d", [&](auto& e, auto& k) { cfg.problem.d = to_double(e, k); }},
      {"problem.k", [&](auto& e, auto& k) { cfg.problem.k = to_double(e, k); }},
      {"problem.paper_literal_subdiff", [&](auto& e, auto& k) { cfg.problem.paper_literal_subdiff = to_bool(e, k); }},
      {"problem.nonconvex.slope", [&](auto& e, auto& k) { cfg.problem.nonconvex.slope = to_double(e, k); }},
      {"problem.nonconvex.kink", [&](auto& e, auto& k) { cfg.problem.nonconvex.kink = to_double(e, k); }},
      {"problem.nonconvex.jump", [&](auto& e, auto& k) { cfg.problem.nonconvex.jump = to_double(e, k); }},
      {"problem.nonconvex.descent", [&](auto& e, auto& k) { cfg.problem.nonconvex.descent = to_double(e, k); }},
      {"problem.nonconvex.width", [&](auto& e, auto& k) { cfg.problem.nonconvex.width = to_double(e, k); }},
      {"problem.forcing", [&](auto& e, auto&) { cfg.problem.forcing.preset = e.value; }},
      {"problem.forcing.f0", [&](auto& e, auto& k) { cfg.problem.forcing.f0_coeffs = to_doubles(e, k); }},
      {"problem.forcing.fN", [&](auto& e, auto& k) { cfg.problem.forcing.fN_coeffs = to_doubles(e, k); }},
      {"problem.u0", [&](auto& e, auto&) { cfg.problem.initial.preset = e.value; }},
      {"problem.u0.coeffs", [&](auto& e, auto& k) { cfg.problem.initial.coeffs = to_doubles(e, k); }},
      {"problem.alpha", [&](auto& e, auto& k) { cfg.problem.constants.alpha = to_double(e, k); }},
      {"problem.beta", [&](auto& e, auto& k) { cfg.problem.constants.beta = to_double(e, k); }},
      {"problem.a_growth", [&](auto& e, auto& k) { cfg.problem.constants.a_growth = to_double(e, k); }},
      {"problem.b_growth", [&](auto& e, auto& k) { cfg.problem.constants.b_growth = to_double(e, k); }},
      {"scheme.scheme",
       [&](auto& e, auto& k) {
         try {
           cfg.scheme.scheme = parse_scheme(e.value);
         } catch (const InvalidInput& err) {
           fail(err.what(), e.line, k);
         }
       }},
      {"scheme.steps", [&](auto& e, auto& k) { cfg.scheme.steps = to_ints(e, k); }},
      {"scheme.taus", [](auto&, auto&) {}},  // resolved below, needs T_final
      {"scheme.reference_steps", [&](auto& e, auto& k) { cfg.scheme.reference_steps = to_int(e, k); }},
      {"solver.tol", [&](auto& e, auto& k) { cfg.solver.tol = to_double(e, k); }},
      {"solver.tol_membership", [&](auto& e, auto& k) { cfg.solver.tol_membership = to_double(e, k); }},
      {"solver.eps0", [&](auto& e, auto& k) { cfg.solver.eps0 = to_double(e, k); }},
      {"solver.eps_min", [&](auto& e, auto& k) { cfg.solver.eps_min = to_double(e, k); }},
      {"solver.max_iter", [&](auto& e, auto& k) { cfg.solver.max_iter = to_int(e, k); }},
      {"output.dir", [&](auto& e, auto&) { cfg.output_dir = e.value; }},
      {"check.samples", [&](auto& e, auto& k) { cfg.check.samples = to_int(e, k); }},
      {"check.coercivity_taus", [&](auto& e, auto& k) { cfg.check.coercivity_taus = to_doubles(e, k); }},
      {"check.fuzz_triples", [&](auto& e, auto& k) { cfg.check.fuzz_triples = to_int(e, k); }},
  };
  for (const auto& [key, entry] : entries) {
    const auto it = setters.find(key);
    if (it == setters.end()) fail("unknown key", entry.line, key);
    it->second(entry, key);
  }

  auto line_of = [&](const std::string& key) {
    const auto it = entries.find(key);
    return it == entries.end() ? 0 : it->second.line;
  };
  if (const auto it = entries.find("scheme.taus"); it != entries.end()) {
    if (entries.count("scheme.steps")) fail("give either steps or taus, not both", it->second.line, "scheme.taus");
    cfg.scheme.steps.clear();
    for (double tau : to_doubles(it->second, "scheme.taus")) {
      if (!(tau > 0.0)) fail("tau must be positive", it->second.line, "scheme.taus");
      const double n = std::round(cfg.problem.T_final / tau);
      if (n < 1.0 || std::abs(n * tau - cfg.problem.T_final) > 4.0 * std::ldexp(std::abs(cfg.problem.T_final), -52))
        fail("tau " + format_double(tau) + " does not divide T_final", it->second.line, "scheme.taus");
      cfg.scheme.steps.push_back(static_cast<int>(n));
    }
  }

  if (cfg.problem.n_el < 1) fail("n_el must be at least 1", line_of("problem.n_el"), "problem.n_el");
  if (!(cfg.problem.T_final > 0.0)) fail("T_final must be positive", line_of("problem.T_final"), "problem.T_final");
  if (cfg.scheme.steps.empty()) fail("ladder must not be empty", line_of("scheme.steps"), "scheme.steps");
  for (int n : cfg.scheme.steps)
    if (n < 1) fail("step counts must be positive", line_of("scheme.steps"), "scheme.steps");
  if (cfg.scheme.reference_steps < 2)
    fail("reference_steps must be at least 2", line_of("scheme.reference_steps"), "scheme.reference_steps");
  if (!(cfg.solver.tol > 0.0)) fail("tol must be positive", line_of("solver.tol"), "solver.tol");
  if (!(cfg.solver.eps_min > 0.0) || cfg.solver.eps_min > cfg.solver.eps0)
    fail("need 0 < eps_min <= eps0", line_of("solver.eps_min"), "solver.eps_min");
  if (cfg.solver.max_iter < 1) fail("max_iter must be positive", line_of("solver.max_iter"), "solver.max_iter");
  if (cfg.check.samples < 1) fail("samples must be positive", line_of("check.samples"), "check.samples");
  if (cfg.output_dir.empty()) fail("output dir must not be empty", line_of("output.dir"), "output.dir");
  try {
    (void)make_potential(cfg.problem);
    (void)presets::make_forcing(cfg.problem.forcing, make_potential(cfg.problem));
    (void)presets::make_initial_function(cfg.problem.initial, make_potential(cfg.problem));
  } catch (const InvalidInput& e) {
    fail(e.what(), line_of("problem.potential"), "problem");
  }
  return cfg;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'", 0, "");
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  const auto& p = c.problem;
  os << "[problem]\n"
     << "n_el = " << p.n_el << "\n"
     << "T_final = " << format_double(p.T_final) << "\n"
     << "potential = " << p.potential << "\n"
     << "d = " << format_double(p.d) << "\n"
     << "k = " << format_double(p.k) << "\n"
     << "paper_literal_subdiff = " << (p.paper_literal_subdiff ? "true" : "false") << "\n"
     << "nonconvex.slope = " << format_double(p.nonconvex.slope) << "\n"
     << "nonconvex.kink = " << format_double(p.nonconvex.kink) << "\n"
     << "nonconvex.jump = " << format_double(p.nonconvex.jump) << "\n"
     << "nonconvex.descent = " << format_double(p.nonconvex.descent) << "\n"
     << "nonconvex.width = " << format_double(p.nonconvex.width) << "\n"
     << "forcing = " << p.forcing.preset << "\n"
     << "forcing.f0 = " << join(p.forcing.f0_coeffs) << "\n"
     << "forcing.fN = " << join(p.forcing.fN_coeffs) << "\n"
     << "u0 = " << p.initial.preset << "\n"
     << "u0.coeffs = " << join(p.initial.coeffs) << "\n"
     << "alpha = " << format_double(p.constants.alpha) << "\n"
     << "beta = " << format_double(p.constants.beta) << "\n"
     << "a_growth = " << format_double(p.constants.a_growth) << "\n"
     << "b_growth = " << format_double(p.constants.b_growth) << "\n"
     << "\n[scheme]\n"
     << "scheme = " << scheme_name(c.scheme.scheme) << "\n"
     << "steps = " << join(c.scheme.steps) << "\n"
     << "reference_steps = " << c.scheme.reference_steps << "\n"
     << "\n[solver]\n"
     << "tol = " << format_double(c.solver.tol) << "\n"
     << "tol_membership = " << format_double(c.solver.tol_membership) << "\n"
     << "eps0 = " << format_double(c.solver.eps0) << "\n"
     << "eps_min = " << format_double(c.solver.eps_min) << "\n"
     << "max_iter = " << c.solver.max_iter << "\n"
     << "\n[output]\n"
     << "dir = " << c.output_dir << "\n"
     << "\n[check]\n"
     << "samples = " << c.check.samples << "\n"
     << "coercivity_taus = " << join(c.check.coercivity_taus) << "\n"
     << "fuzz_triples = " << c.check.fuzz_triples << "\n";
  return os.str();
}

ScalarPotential make_potential(const ProblemConfig& p) {
  if (p.potential == "paper_exponential") return ScalarPotential::paper_exponential(p.d, p.paper_literal_subdiff);
  if (p.potential == "linear_robin") return ScalarPotential::linear_robin(p.k);
  if (p.potential == "nonconvex_piecewise") return ScalarPotential(p.nonconvex);
  if (p.potential == "zero") return ScalarPotential::zero();
  throw InvalidInput("unknown potential '" + p.potential + "'");
}

Problem make_problem(const ProblemConfig& p) {
  return presets::make_problem(fem1d::Mesh1D(p.n_el), make_potential(p), p.forcing, p.initial, p.T_final,
                               p.constants);
}

}  // namespace rothe
