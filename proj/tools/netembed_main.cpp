// Command-line front end: runs the embedding/recovery/covering experiments
// from a flat key = value config and projects result CSVs into plot tables.
//
//   netembed meanwidth  --config cfg.ini --out results/
//   netembed sweep      --config cfg.ini --seed 7 --replicates 10
//   netembed plotdata   --csv results/recovery.csv --x m --y error
//                       --group method --out plot.csv
//
// Exit codes: 0 success, 2 config error, 3 numerical degeneracy.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "netembed/experiments.hpp"
#include "netembed/version.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> replicates;
  bool quiet = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file")
      ->required();
  cmd->add_option("--seed", flags.seed, "override the master seed");
  cmd->add_option("--out", flags.out, "override the output directory");
  cmd->add_option("--replicates", flags.replicates, "override replicate count");
  cmd->add_flag("--quiet", flags.quiet, "suppress progress messages");
}

int run(const CommonFlags& flags, netembed::ExperimentKind kind) {
  netembed::ExperimentConfig cfg = netembed::parse_config_file(flags.config_path);
  cfg.experiment = kind;
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.out) cfg.out_dir = *flags.out;
  if (flags.replicates) cfg.replicates = *flags.replicates;
  if (flags.quiet) cfg.quiet = true;
  const netembed::RunReport report = netembed::run_experiment(cfg);
  if (!cfg.quiet) {
    for (const std::string& artifact : report.artifacts)
      std::cerr << "[netembed] wrote " << artifact << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random-layer embedding experiments"};
  app.set_version_flag("--version", std::string("netembed ") + netembed::kVersion);
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    netembed::ExperimentKind kind;
  };
  const Sub subs[] = {
      {"meanwidth", "Monte Carlo mean width vs closed-form bounds",
       netembed::ExperimentKind::MeanWidth},
      {"embed", "distance distortion through a random layer",
       netembed::ExperimentKind::Embedding},
      {"recover", "input recovery error sweep over output dimensions",
       netembed::ExperimentKind::Recovery},
      {"covering", "empirical covering-number recursion checks",
       netembed::ExperimentKind::Covering},
      {"samplesize", "net-size estimate from the width bound",
       netembed::ExperimentKind::SampleSize},
      {"sweep", "all experiments in one run",
       netembed::ExperimentKind::FullSweep},
  };

  CommonFlags flags[std::size(subs)];
  for (std::size_t i = 0; i < std::size(subs); ++i)
    add_common_flags(app.add_subcommand(subs[i].name, subs[i].help), flags[i]);

  CLI::App* plot = app.add_subcommand(
      "plotdata", "project a result CSV onto a tidy (x, y, group) table");
  std::string plot_csv, plot_x, plot_y, plot_group, plot_out;
  plot->add_option("--csv", plot_csv, "input CSV path")->required();
  plot->add_option("--x", plot_x, "field for the x column")->required();
  plot->add_option("--y", plot_y, "field for the y column")->required();
  plot->add_option("--group", plot_group, "optional grouping field");
  plot->add_option("--out", plot_out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < std::size(subs); ++i)
      if (app.got_subcommand(subs[i].name)) return run(flags[i], subs[i].kind);
    if (app.got_subcommand("plotdata")) {
      const netembed::PlotdataResult result =
          netembed::emit_plotdata(plot_csv, plot_x, plot_y, plot_group, plot_out);
      if (result.warning)
        std::cerr << "[netembed] warning: " << result.message << "\n";
      return 0;
    }
  } catch (const netembed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const netembed::DegenerateError& e) {
    std::cerr << "numerical degeneracy: " << e.what() << "\n";
    return 3;
  } catch (const netembed::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
