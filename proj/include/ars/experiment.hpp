#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ars/config.hpp"
#include "ars/radius.hpp"

namespace ars {

struct ExperimentRow {
  std::uint64_t idx = 0;
  int label = 0;
  CertificationResult result;
};

// Certifies every instance of every seed's dataset under the configured
// pipeline. Rows come back in input order; certification parallelizes
// over a pool of config.jobs workers without affecting the output.
std::vector<ExperimentRow> run_certification(const ExperimentConfig& config);

// Same certification pass over an externally supplied dataset (CSV
// import path); the config's d and k must match the instances.
std::vector<ExperimentRow> certify_imported(
    const ExperimentConfig& config, const std::vector<BenchInstance>& dataset);

// CSV emitters. Every output starts with the resolved config echoed as
// '#'-prefixed comment lines, so a result file names the experiment that
// produced it.
void write_results_csv(std::ostream& out, const ExperimentConfig& config,
                       const std::vector<ExperimentRow>& rows);
void write_dataset_csv(std::ostream& out, const ExperimentConfig& config);

// Reads a results CSV (as written above; comment lines ignored) and
// evaluates the certified-accuracy curve on the grid. Parse failures
// report the offending line number.
void write_curve_csv(std::istream& results, std::ostream& out,
                     const std::vector<double>& radius_grid);

struct SelfCheckEntry {
  std::string suite;
  double measured = 0.0;
  double allowed = 0.0;
  bool passed = false;
};

// Oracle suites behind the selfcheck subcommand. radius_scale is the
// falsification hook: 1.0 is the release gate, larger values must make
// the soundness sweep report violations (proof the attacker has teeth).
std::vector<SelfCheckEntry> run_selfcheck(double radius_scale = 1.0);
void write_selfcheck_report(std::ostream& out,
                            const std::vector<SelfCheckEntry>& entries);

}  // namespace ars
