// rothe-hvi run|study|compare|check --config <path> [--out <dir>] [--seed <n>] [--jobs <n>] [--quiet]

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rothe/commands.hpp"
#include "rothe/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Double-step Rothe solver for parabolic hemivariational inclusions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  rothe::cli::CommandOptions opts;

  auto add_common = [&](CLI::App* sub) {
    auto* pos = sub->add_option("config_file", config_path, "experiment config (INI)");
    auto* flag = sub->add_option("--config", config_path, "experiment config (INI)");
    pos->excludes(flag);
    flag->excludes(pos);
    sub->add_option("--out", out_dir, "output directory (default: $ROTHE_HVI_OUT, then [output] dir)");
    sub->add_option("--seed", opts.seed, "seed for sampled checks");
    sub->add_option("--jobs", opts.jobs, "concurrent ladder runs")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", opts.quiet, "suppress progress messages");
  };
  auto* run = app.add_subcommand("run", "single trajectory at the first ladder entry");
  auto* study = app.add_subcommand("study", "tau-ladder study with observed order");
  auto* compare = app.add_subcommand("compare", "BDF2 against backward Euler on the same ladder");
  auto* check = app.add_subcommand("check", "hypothesis and identity checks");
  for (auto* sub : {run, study, compare, check}) add_common(sub);

  CLI11_PARSE(app, argc, argv);
  if (config_path.empty()) {
    std::cerr << "error: a config file is required (positional or --config)\n";
    return 2;
  }
  if (!out_dir.empty()) opts.out_dir = out_dir;

  try {
    const rothe::ExperimentConfig cfg = rothe::load_config(config_path);
    if (run->parsed()) return rothe::cli::cmd_run(cfg, opts);
    if (study->parsed()) return rothe::cli::cmd_study(cfg, opts);
    if (compare->parsed()) return rothe::cli::cmd_compare(cfg, opts);
    return rothe::cli::cmd_check(cfg, opts);
  } catch (const rothe::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
