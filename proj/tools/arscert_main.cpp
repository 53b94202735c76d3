#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ars/bench.hpp"
#include "ars/config.hpp"
#include "ars/experiment.hpp"

namespace {

using ars::ConfigError;
using ars::ExperimentConfig;

// Experiment flags shared by the certify and dataset subcommands. A flag
// given on the command line overrides the config file; everything else
// keeps its default.
struct ExperimentFlags {
  std::string config_path;
  double sigma = 0.0;
  double sigma1 = 0.0;
  double alpha = 0.0;
  double margin = 0.0;
  std::uint64_t d = 0, k = 0, n0 = 0, n = 0, samples = 0, window = 0, jobs = 0;
  std::string mask, mode;
  std::vector<std::uint64_t> seeds;
  std::vector<double> grid;

  CLI::Option* o_sigma = nullptr;
  CLI::Option* o_sigma1 = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_margin = nullptr;
  CLI::Option* o_d = nullptr;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_n0 = nullptr;
  CLI::Option* o_n = nullptr;
  CLI::Option* o_samples = nullptr;
  CLI::Option* o_window = nullptr;
  CLI::Option* o_jobs = nullptr;
  CLI::Option* o_mask = nullptr;
  CLI::Option* o_mode = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_grid = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "configuration file (key = value lines, # comments)");
    o_sigma = cmd->add_option("--sigma", sigma, "total noise budget");
    o_sigma1 =
        cmd->add_option("--sigma1", sigma1, "step-1 scale (default sqrt(2)*sigma)");
    o_d = cmd->add_option("--d", d, "input dimension");
    o_k = cmd->add_option("--k", k, "signal window width");
    o_n0 = cmd->add_option("--n0", n0, "class-selection sample count");
    o_n = cmd->add_option("--n", n, "estimation sample count");
    o_alpha = cmd->add_option("--alpha", alpha, "certification failure budget");
    o_mask = cmd->add_option(
        "--mask", mask, "mask kind: allones|oracle|energywindow|staticstub");
    o_mode =
        cmd->add_option("--mode", mode, "pipeline mode: ars|plainrs|staticstub");
    o_seed = cmd->add_option("--seed", seeds, "seeds (repeat or comma-separate)")
                 ->delimiter(',');
    o_jobs = cmd->add_option("--jobs", jobs, "worker threads");
    o_samples = cmd->add_option("--samples", samples, "instances per seed");
    o_margin = cmd->add_option("--margin", margin, "signal margin");
    o_window =
        cmd->add_option("--window", window, "energy-window width (default k)");
    o_grid = cmd->add_option("--grid", grid, "radius grid (comma-separated)")
                 ->delimiter(',');
  }

  ExperimentConfig build() const {
    ExperimentConfig cfg = config_path.empty()
                               ? ExperimentConfig{}
                               : ExperimentConfig::from_file(config_path);
    if (o_sigma->count()) cfg.sigma = sigma;
    if (o_sigma1->count()) cfg.sigma1 = sigma1;
    if (o_d->count()) cfg.d = d;
    if (o_k->count()) cfg.k = k;
    if (o_n0->count()) cfg.n0 = n0;
    if (o_n->count()) cfg.n = n;
    if (o_alpha->count()) cfg.alpha = alpha;
    if (o_mask->count()) cfg.mask_kind = ars::mask_kind_from_token(mask);
    if (o_mode->count()) cfg.mode = ars::mode_from_token(mode);
    if (o_seed->count()) cfg.seeds = seeds;
    if (o_jobs->count()) cfg.jobs = jobs;
    if (o_samples->count()) cfg.sample_count = samples;
    if (o_margin->count()) cfg.signal_margin = margin;
    if (o_window->count()) cfg.window_k = window;
    if (o_grid->count()) cfg.radius_grid = grid;
    return cfg;
  }
};

void with_output(const std::string& out_path,
                 const std::function<void(std::ostream&)>& writer) {
  if (out_path == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output '" + out_path + "'");
  writer(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + out_path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomized-smoothing certification workbench"};
  app.require_subcommand(1);

  CLI::App* certify = app.add_subcommand(
      "certify", "certify a benchmark dataset, write the results CSV");
  ExperimentFlags certify_flags;
  certify_flags.attach(certify);
  std::string certify_out = "-";
  std::string certify_dataset;
  certify->add_option("--out", certify_out, "output file ('-' = stdout)");
  certify->add_option("--dataset", certify_dataset,
                      "certify instances imported from a dataset CSV instead "
                      "of generating them");

  CLI::App* curve = app.add_subcommand(
      "curve", "certified-accuracy curve from a results CSV");
  std::string curve_in;
  std::string curve_out = "-";
  std::vector<double> curve_grid;
  curve->add_option("--in", curve_in, "results CSV to evaluate")->required();
  curve->add_option("--out", curve_out, "output file ('-' = stdout)");
  CLI::Option* o_curve_grid =
      curve->add_option("--grid", curve_grid, "radius grid (comma-separated)")
          ->delimiter(',');

  CLI::App* selfcheck =
      app.add_subcommand("selfcheck", "run the oracle and soundness suites");
  double radius_scale = 1.0;
  selfcheck->add_option(
      "--radius-scale", radius_scale,
      "inflate attacked radii (falsification hook; 1.0 = release gate)");

  CLI::App* dataset = app.add_subcommand(
      "dataset", "export the first seed's benchmark dataset as CSV");
  ExperimentFlags dataset_flags;
  dataset_flags.attach(dataset);
  std::string dataset_out = "-";
  dataset->add_option("--out", dataset_out, "output file ('-' = stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (certify->parsed()) {
      const auto start = std::chrono::steady_clock::now();
      ExperimentConfig cfg = certify_flags.build();
      cfg.resolve();
      cfg.validate();
      std::vector<ars::ExperimentRow> rows;
      if (!certify_dataset.empty()) {
        std::ifstream in(certify_dataset);
        if (!in) {
          throw std::runtime_error("cannot open dataset '" + certify_dataset +
                                   "'");
        }
        rows = ars::certify_imported(cfg, ars::import_dataset_csv(in));
      } else {
        rows = ars::run_certification(cfg);
      }
      with_output(certify_out, [&](std::ostream& out) {
        ars::write_results_csv(out, cfg, rows);
      });
      const std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - start;
      std::cerr << "certified " << rows.size() << " instances in "
                << elapsed.count() << " s\n";
      return 0;
    }
    if (curve->parsed()) {
      std::vector<double> grid;
      if (o_curve_grid->count()) {
        grid = curve_grid;
      } else {
        ExperimentConfig defaults;
        defaults.resolve();
        grid = defaults.radius_grid;
      }
      if (!std::is_sorted(grid.begin(), grid.end())) {
        throw ConfigError("grid", "must be sorted ascending");
      }
      for (double r : grid) {
        if (!(r >= 0.0)) throw ConfigError("grid", "radii must be nonnegative");
      }
      std::ifstream in(curve_in);
      if (!in) throw std::runtime_error("cannot open results '" + curve_in + "'");
      with_output(curve_out, [&](std::ostream& out) {
        ars::write_curve_csv(in, out, grid);
      });
      return 0;
    }
    if (selfcheck->parsed()) {
      const std::vector<ars::SelfCheckEntry> entries =
          ars::run_selfcheck(radius_scale);
      ars::write_selfcheck_report(std::cout, entries);
      for (const ars::SelfCheckEntry& entry : entries) {
        if (!entry.passed) return 1;
      }
      return 0;
    }
    if (dataset->parsed()) {
      ExperimentConfig cfg = dataset_flags.build();
      with_output(dataset_out, [&](std::ostream& out) {
        ars::write_dataset_csv(out, cfg);
      });
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
