#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dkf/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dkfsim - distributed Kalman filtering over sensor networks"};
  app.require_subcommand(1);

  dkf::cli::RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "run a scenario and write trace/summary CSV files");
  run->add_option("--preset", run_opt.preset, "bundled scenario name (see `presets`)");
  run->add_option("--config", run_opt.config_path, "scenario config file (JSON)")
      ->check(CLI::ExistingFile);
  run->add_option("--seed", run_opt.seed, "base random seed (default 1)");
  std::string seeds_arg;
  CLI::Option* seeds_opt =
      run->add_option("--seeds", seeds_arg,
                      "independent seeds seed, seed+1, ... (summary CSV only; bare flag = 20)")
          ->expected(0, 1);
  run->add_option("--out", run_opt.out_dir, "output directory (default .)");
  run->add_option("--filters", run_opt.filters, "comma-separated filter list, e.g. CKF,IFDKF");
  run->add_option("--epsilon", run_opt.epsilon,
                  "consensus step size for KCF/GKCF/ICF: a number or 'auto'");
  run->add_option("--ticks", run_opt.ticks, "number of time steps");

  dkf::cli::AnalyzeOptions analyze_opt;
  CLI::App* analyze =
      app.add_subcommand("analyze", "report degrees, connectivity and naive nodes per epoch");
  analyze->add_option("--preset", analyze_opt.preset, "bundled scenario name");
  analyze->add_option("--config", analyze_opt.config_path, "scenario config file (JSON)")
      ->check(CLI::ExistingFile);

  CLI::App* presets = app.add_subcommand("presets", "list bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dkf::cli::kExitOk : dkf::cli::kExitConfigError;
  }

  if (seeds_opt->count() > 0) {
    if (seeds_arg.empty()) {
      run_opt.seeds = 20;
    } else {
      try {
        std::size_t consumed = 0;
        run_opt.seeds = std::stoi(seeds_arg, &consumed);
        if (consumed != seeds_arg.size()) throw std::invalid_argument(seeds_arg);
      } catch (const std::exception&) {
        std::cerr << "error: --seeds: expected an integer\n";
        return dkf::cli::kExitConfigError;
      }
    }
  }

  if (run->parsed()) return dkf::cli::cmd_run(run_opt, std::cout, std::cerr);
  if (analyze->parsed()) return dkf::cli::cmd_analyze(analyze_opt, std::cout, std::cerr);
  if (presets->parsed()) return dkf::cli::cmd_presets(std::cout);
  return dkf::cli::kExitFailure;
}
