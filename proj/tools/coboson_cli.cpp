// coboson: normalization factors, ratio bounds, and the extremal hierarchy
// for two-fermion composites, from the command line.
//
// Subcommands: chi, bounds, sweep, figure, verify. Exit codes:
//   0 ok, 1 bad arguments, 2 infeasible fixed parameters, 3 I/O failure,
//   4 internal consistency failure (hierarchy / property checks).

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coboson/coboson.hpp"

namespace {

struct RangeOpt {
  coboson::Range range;
  bool set = false;
};

void add_range_option(CLI::App* cmd, RangeOpt& opt) {
  cmd->add_option_function<std::string>(
         "--range",
         [&opt](const std::string& text) {
           coboson::Range r;
           if (std::sscanf(text.c_str(), "%lf:%lf:%lld", &r.start, &r.stop,
                           reinterpret_cast<long long*>(&r.steps)) != 3)
             throw CLI::ValidationError("--range", "expected start:stop:steps");
           opt.range = r;
           opt.set = true;
         },
         "grid as start:stop:steps");
}

int finish(const coboson::RunResult& result) {
  for (const auto& path : result.outputs) std::cout << path << "\n";
  if (result.exit_code != coboson::kExitOk && !result.message.empty())
    std::cerr << "error: " << result.message << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"composite-boson normalization factors and saturable bounds"};
  app.require_subcommand(1);

  coboson::SweepConfig config;
  RangeOpt range_opt;
  std::string axis = "lambda1";
  std::string format = "csv";
  std::string figure = "fig1";
  std::int64_t verify_cases = 100;
  bool inject_fault = false;

  auto* chi_cmd = app.add_subcommand("chi", "chi series of a distribution file");
  chi_cmd->add_option("--dist", config.dist_path, "distribution file (.json array or .csv)")
      ->required();
  chi_cmd->add_option("--n-max", config.n_max, "largest N (default: S)");
  chi_cmd->add_option("--engine", config.engine, "esp | newton_girard | multiplicity")
      ->check(CLI::IsMember({"esp", "newton_girard", "multiplicity"}));
  chi_cmd->add_option("--out", config.out_path, "output path");
  chi_cmd->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  auto* bounds_cmd = app.add_subcommand("bounds", "bounds hierarchy at one (P, lambda1, N)");
  bounds_cmd->add_option("--P", config.P, "purity")->required();
  bounds_cmd->add_option("--lambda1", config.lambda1, "largest Schmidt coefficient")->required();
  bounds_cmd->add_option("--N", config.N, "composite number")->required();
  bounds_cmd->add_option("--out", config.out_path, "output path");
  bounds_cmd->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  auto* sweep_cmd = app.add_subcommand("sweep", "bounds hierarchy over a parameter grid");
  sweep_cmd->add_option("--axis", axis, "lambda1 | P | N")
      ->check(CLI::IsMember({"lambda1", "P", "N"}));
  add_range_option(sweep_cmd, range_opt);
  sweep_cmd->add_option("--P", config.P, "fixed purity");
  sweep_cmd->add_option("--lambda1", config.lambda1, "fixed largest coefficient");
  sweep_cmd->add_option("--N", config.N, "fixed composite number");
  sweep_cmd->add_option("--dist", config.dist_path,
                        "optional distribution; adds chi/ratio columns on N sweeps");
  sweep_cmd->add_option("--out", config.out_path, "output path");
  sweep_cmd->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  sweep_cmd->add_option("--seed", config.seed, "random seed");
  sweep_cmd->add_option("--jobs", config.jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* figure_cmd = app.add_subcommand("figure", "write a preset figure-data set");
  figure_cmd->add_option("--figure", figure, "fig1 | fig3 | fig4 | fig5")
      ->check(CLI::IsMember({"fig1", "fig3", "fig4", "fig5"}))
      ->required();
  figure_cmd->add_option("--out", config.out_path, "output directory");
  figure_cmd->add_option("--jobs", config.jobs, "worker threads")->check(CLI::PositiveNumber);
  figure_cmd->add_option("--seed", config.seed, "random seed");

  auto* verify_cmd = app.add_subcommand("verify", "run the randomized property suite");
  verify_cmd->add_option("--seed", config.seed, "random seed");
  verify_cmd->add_option("--cases", verify_cases, "cases per property")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--out", config.out_path, "report path");
  verify_cmd->add_flag("--inject-fault", inject_fault,
                       "testing aid: corrupt one check to exercise the failure path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return coboson::kExitBadArguments;
  }

  config.format = format == "json" ? coboson::OutputFormat::Json : coboson::OutputFormat::Csv;

  if (chi_cmd->parsed()) {
    config.mode = coboson::SweepMode::Chi;
    return finish(coboson::run_sweep(config));
  }
  if (bounds_cmd->parsed()) {
    config.mode = coboson::SweepMode::Bounds;
    return finish(coboson::run_sweep(config));
  }
  if (sweep_cmd->parsed()) {
    if (!range_opt.set) {
      std::cerr << "error: sweep requires --range\n";
      return coboson::kExitBadArguments;
    }
    config.range = range_opt.range;
    config.mode = axis == "P" ? coboson::SweepMode::SweepP
                 : axis == "N" ? coboson::SweepMode::SweepN
                               : coboson::SweepMode::SweepLambda1;
    return finish(coboson::run_sweep(config));
  }
  if (figure_cmd->parsed()) {
    config.mode = coboson::SweepMode::Figure;
    config.figure = figure == "fig5"   ? coboson::FigureId::Fig5
                    : figure == "fig4" ? coboson::FigureId::Fig4
                    : figure == "fig3" ? coboson::FigureId::Fig3
                                       : coboson::FigureId::Fig1;
    return finish(coboson::run_figure(config));
  }
  return finish(coboson::run_verify(config.seed, verify_cases, config.out_path, inject_fault));
}
