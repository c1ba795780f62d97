#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "minl2/runner.hpp"

namespace {

struct Args {
  std::string config;
  std::string out;
  std::optional<int> resolution;
  std::optional<double> tol;
};

void add_common(CLI::App* cmd, Args& args, const std::string& config_help) {
  cmd->add_option("--config", args.config, config_help)->required();
  cmd->add_option("--out", args.out, "Output directory (default: the config's output_dir, else ./out)");
  cmd->add_option("--resolution", args.resolution, "Quadrature resolution override")->check(CLI::Range(4, 4096));
  cmd->add_option("--tol", args.tol, "Relative tolerance override")->check(CLI::PositiveNumber);
}

minl2::RunOptions options_from(const Args& args) {
  minl2::RunOptions opts;
  opts.out_dir = args.out;
  opts.resolution = args.resolution;
  opts.tol = args.tol;
  return opts;
}

int run_single(const std::string& name, const Args& args) {
  minl2::ExperimentConfig cfg;
  try {
    cfg = minl2::load_config(args.config);
    minl2::apply_overrides(cfg, options_from(args));
  } catch (const minl2::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return minl2::kExitUsage;
  }
  const minl2::RunReport report = minl2::run({name}, cfg, options_from(args));
  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << cfg.name;
    if (!c.error.empty()) std::cout << "  (" << c.error << ")";
    std::cout << "\n";
  }
  return report.pass ? minl2::kExitPass : minl2::kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal L2 integrals on model domains"};
  app.set_version_flag("--version", std::string(minl2::kVersion));
  app.require_subcommand(1);

  Args args;
  const std::vector<std::pair<std::string, std::string>> checks = {
      {"compute-g", "Sample G(t; c) on the t-grid"},
      {"check-concavity", "Concavity of G(g^{-1}(r)) in r"},
      {"check-linearity", "Agreement of the three linearity criteria"},
      {"bergman-ratio", "Bergman kernel restriction law on sublevel sets"},
      {"verify-ode", "Residuals of the closed-form (u, s) ODE solution"},
      {"verify-identities", "Layer cake, integration by parts, quotient, Pythagoras and monotone limits"},
      {"extension-check", "Cutoff extension inequality or optimal extension equality"},
  };
  for (const auto& [name, help] : checks) add_common(app.add_subcommand(name, help), args, "Config file");
  CLI::App* suite = app.add_subcommand("suite", "Run every *.cfg in a directory");
  add_common(suite, args, "Directory of config files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : minl2::kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen == suite) {
    try {
      const minl2::SuiteReport report = minl2::run_suite(args.config, options_from(args), std::cout);
      return report.exit_code();
    } catch (const minl2::Error& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return minl2::kExitUsage;
    }
  }
  return run_single(chosen->get_name(), args);
}
