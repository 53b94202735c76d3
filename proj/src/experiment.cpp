#include "ars/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "ars/bench.hpp"
#include "ars/fdp.hpp"
#include "ars/pipeline.hpp"
#include "ars/stats.hpp"
#include "ars/verify.hpp"

namespace ars {
namespace {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void echo_config(std::ostream& out, const ExperimentConfig& config) {
  std::istringstream lines(config.serialize());
  std::string line;
  while (std::getline(lines, line)) out << "# " << line << '\n';
}

MaskFunction mask_for(const ExperimentConfig& config,
                      const BenchInstance& instance, const MaskVector& stub) {
  MaskKind kind = config.mode == ExperimentMode::kStaticStub
                      ? MaskKind::kStaticLearnedStub
                      : config.mask_kind;
  switch (kind) {
    case MaskKind::kAllOnes:
      return all_ones_mask_fn(config.d);
    case MaskKind::kOracleIndicator:
      return oracle_mask_fn(instance);
    case MaskKind::kEnergyWindow:
      return energy_window_mask_fn(config.window_k);
    case MaskKind::kStaticLearnedStub:
      return fixed_mask_fn(stub);
  }
  return all_ones_mask_fn(config.d);
}

}  // namespace

namespace {

// One certification pass over a fixed dataset. Instance i certifies from
// stream 1 + i of the seed root, so the worker count never changes any
// draw.
void certify_pass(const ExperimentConfig& config, const PipelineSpec& spec,
                  const std::vector<double>& weights,
                  const std::vector<BenchInstance>& dataset,
                  const SeededRng& root, std::uint64_t& next_idx,
                  std::vector<ExperimentRow>& rows) {
  MaskVector stub;
  const bool needs_stub =
      config.mode == ExperimentMode::kStaticStub ||
      (config.mode == ExperimentMode::kArs &&
       config.mask_kind == MaskKind::kStaticLearnedStub);
  if (needs_stub) stub = static_stub_mask(dataset);

  std::vector<ExperimentRow> seed_rows(dataset.size());
  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto work = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= dataset.size() || failed.load()) return;
      try {
        const BenchInstance& instance = dataset[i];
        SmoothedPipeline pipeline;
        pipeline.spec = spec;
        pipeline.mask_fn = mask_for(config, instance, stub);
        pipeline.base = linear_base_classifier(weights, instance.relevant);
        SeededRng rng = root.stream(1 + i);
        seed_rows[i].label = instance.label;
        seed_rows[i].result =
            certify(pipeline, instance.x, config.n0, config.n, config.alpha,
                    rng, CertifyMode::kTwoClassGrouping, Norm::kLinf);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  const std::size_t workers = static_cast<std::size_t>(
      std::min<std::uint64_t>(config.jobs, dataset.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (ExperimentRow& row : seed_rows) {
    row.idx = next_idx++;
    rows.push_back(std::move(row));
  }
}

PipelineSpec spec_for(const ExperimentConfig& config) {
  return config.mode == ExperimentMode::kPlainRs
             ? PipelineSpec::plain_rs(config.sigma, config.d)
             : PipelineSpec::two_step(config.sigma, config.sigma1, config.d);
}

}  // namespace

std::vector<ExperimentRow> run_certification(const ExperimentConfig& raw) {
  ExperimentConfig config = raw;
  config.resolve();
  config.validate();

  const PipelineSpec spec = spec_for(config);
  const std::vector<double> weights = signal_weights(config.k);

  std::vector<ExperimentRow> rows;
  rows.reserve(config.seeds.size() * config.sample_count);
  std::uint64_t next_idx = 0;
  for (std::uint64_t seed : config.seeds) {
    SeededRng root(seed);
    SeededRng generator = root.stream(0);
    const std::vector<BenchInstance> dataset = generate_distractor_task(
        config.d, config.k, config.sample_count, config.signal_margin,
        generator);
    certify_pass(config, spec, weights, dataset, root, next_idx, rows);
  }
  return rows;
}

std::vector<ExperimentRow> certify_imported(
    const ExperimentConfig& raw, const std::vector<BenchInstance>& dataset) {
  ExperimentConfig config = raw;
  config.resolve();
  config.validate();
  for (const BenchInstance& instance : dataset) {
    if (instance.x.size() != config.d || instance.relevant.size() != config.k) {
      throw ConfigError("dataset", "instance geometry disagrees with d/k");
    }
  }

  const PipelineSpec spec = spec_for(config);
  const std::vector<double> weights = signal_weights(config.k);
  std::vector<ExperimentRow> rows;
  rows.reserve(config.seeds.size() * dataset.size());
  std::uint64_t next_idx = 0;
  for (std::uint64_t seed : config.seeds) {
    certify_pass(config, spec, weights, dataset, SeededRng(seed), next_idx,
                 rows);
  }
  return rows;
}

void write_results_csv(std::ostream& out, const ExperimentConfig& raw,
                       const std::vector<ExperimentRow>& rows) {
  ExperimentConfig config = raw;
  config.resolve();
  echo_config(out, config);
  out << "idx,label,predict,radius,correct,time_ms\n";
  for (const ExperimentRow& row : rows) {
    const bool correct = !row.result.abstained() &&
                         row.result.predicted_label == row.label;
    // time_ms is pinned to 0: output bytes are part of the determinism
    // contract, and wall time is not. Timing goes to the run log instead.
    out << row.idx << ',' << row.label << ',' << row.result.predicted_label
        << ',' << format_double(row.result.radius) << ',' << (correct ? 1 : 0)
        << ",0\n";
  }
}

void write_dataset_csv(std::ostream& out, const ExperimentConfig& raw) {
  ExperimentConfig config = raw;
  config.resolve();
  config.validate();
  SeededRng generator = SeededRng(config.seeds.front()).stream(0);
  const std::vector<BenchInstance> dataset = generate_distractor_task(
      config.d, config.k, config.sample_count, config.signal_margin,
      generator);
  echo_config(out, config);
  export_dataset_csv(out, dataset, config.k);
}

void write_curve_csv(std::istream& results, std::ostream& out,
                     const std::vector<double>& radius_grid) {
  std::vector<CertificationResult> certs;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(results, line)) {
    line_no += 1;
    if (line.empty() || line[0] == '#' || line.rfind("idx,", 0) == 0) continue;
    std::istringstream row(line);
    std::string field;
    const auto next_field = [&](const char* what) {
      if (!std::getline(row, field, ',')) {
        throw std::runtime_error("results csv line " + std::to_string(line_no) +
                                 ": missing " + what);
      }
      return field;
    };
    try {
      next_field("idx");
      const int label = std::stoi(next_field("label"));
      const int predict = std::stoi(next_field("predict"));
      const double radius = std::stod(next_field("radius"));
      CertificationResult cert;
      cert.predicted_label = predict;
      cert.radius = radius;
      labels.push_back(label);
      certs.push_back(cert);
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception&) {
      throw std::runtime_error("results csv line " + std::to_string(line_no) +
                               ": malformed number");
    }
  }
  const std::vector<CurvePoint> curve =
      certified_accuracy_curve(certs, labels, radius_grid);
  out << "# rows = " << certs.size() << '\n';
  out << "# grid = ";
  for (std::size_t i = 0; i < radius_grid.size(); ++i) {
    if (i) out << ',';
    out << format_double(radius_grid[i]);
  }
  out << '\n';
  out << "radius,accuracy\n";
  for (const CurvePoint& point : curve) {
    out << format_double(point.radius) << ',' << format_double(point.accuracy)
        << '\n';
  }
}

namespace {

double bisect_gate_mu(double p_plus, double p_minus) {
  double lo = 0.0;
  double hi = 16.0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (robustness_gate(TradeoffCurve::gaussian(mid), p_plus, p_minus)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

SelfCheckEntry quantile_roundtrip_suite() {
  SelfCheckEntry entry{"quantile roundtrip", 0.0, 1e-12, false};
  double max_err = 0.0;
  // Log-spaced tail probes down to 1e-12 on both sides plus a uniform
  // central grid.
  for (int e = 1; e <= 120; ++e) {
    const double p = std::pow(10.0, -12.0 * e / 120.0);
    for (double probe : {p, 1.0 - p}) {
      const double err =
          std::fabs(std_normal_cdf(std_normal_quantile(probe)) - probe);
      max_err = std::max(max_err, err);
    }
  }
  for (int i = 1; i < 2000; ++i) {
    const double p = i / 2000.0;
    const double err =
        std::fabs(std_normal_cdf(std_normal_quantile(p)) - p);
    max_err = std::max(max_err, err);
  }
  entry.measured = max_err;
  entry.passed = max_err <= entry.allowed;
  return entry;
}

SelfCheckEntry composition_suite() {
  SelfCheckEntry entry{"composition oracle", 0.0, 1e-6, false};
  double max_err = 0.0;
  std::vector<double> grid;
  for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
  for (double mu1 : {0.5, 1.0, 2.0}) {
    for (double mu2 : {0.5, 1.0, 2.0}) {
      const std::vector<double> numeric =
          numeric_tradeoff_curve(mu1, mu2, grid);
      const GdpBudget composed = compose_gdp({GdpBudget{mu1}, GdpBudget{mu2}});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double closed = gaussian_tradeoff(composed.mu, grid[i]);
        max_err = std::max(max_err, std::fabs(numeric[i] - closed));
      }
    }
  }
  entry.measured = max_err;
  entry.passed = max_err <= entry.allowed;
  return entry;
}

SelfCheckEntry gate_bisection_suite() {
  SelfCheckEntry entry{"gate vs closed form", 0.0, 1e-8, false};
  SeededRng rng(23, 9001);
  double max_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double p_minus = 0.02 + 0.94 * rng.next_uniform();
    const double p_plus =
        p_minus + (0.98 - p_minus) * std::max(1e-3, rng.next_uniform());
    const double closed = max_certified_mu(p_plus, p_minus);
    const double bisected = bisect_gate_mu(p_plus, p_minus);
    max_err = std::max(max_err, std::fabs(closed - bisected));
  }
  entry.measured = max_err;
  entry.passed = max_err <= entry.allowed;
  return entry;
}

SelfCheckEntry budget_split_suite() {
  SelfCheckEntry entry{"budget split roundtrip", 0.0, 1e-12, false};
  SeededRng rng(29, 9002);
  double max_err = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double sigma = 0.2 + 1.8 * rng.next_uniform();
    const double sigma1 = sigma * (1.05 + 2.0 * rng.next_uniform());
    const double sigma2 = split_budget(sigma, sigma1);
    const double r = 0.01 + rng.next_uniform();
    const double d = 1.0 + 1023.0 * rng.next_uniform();
    const double scale = r * std::sqrt(d);
    const GdpBudget composed =
        compose_gdp({GdpBudget{scale / sigma1}, GdpBudget{scale / sigma2}});
    const double expected = scale / sigma;
    max_err = std::max(max_err, std::fabs(composed.mu - expected) / expected);
  }
  entry.measured = max_err;
  entry.passed = max_err <= entry.allowed;
  return entry;
}

}  // namespace

std::vector<SelfCheckEntry> run_selfcheck(double radius_scale) {
  std::vector<SelfCheckEntry> entries;
  entries.push_back(quantile_roundtrip_suite());
  entries.push_back(composition_suite());
  entries.push_back(gate_bisection_suite());
  entries.push_back(budget_split_suite());

  const SweepReport analytic = analytic_soundness_sweep(17, 300, radius_scale);
  entries.push_back(SelfCheckEntry{"analytic soundness sweep",
                                   static_cast<double>(analytic.violations),
                                   0.0, analytic.violations == 0});

  const SweepReport mc = mc_soundness_sweep(18, 200, 100, 1000, 0.05);
  const double budget =
      0.05 * static_cast<double>(mc.configurations) +
      3.0 * std::sqrt(0.05 * 0.95 * static_cast<double>(mc.configurations));
  entries.push_back(SelfCheckEntry{"monte carlo soundness",
                                   static_cast<double>(mc.violations), budget,
                                   static_cast<double>(mc.violations) <= budget});
  return entries;
}

void write_selfcheck_report(std::ostream& out,
                            const std::vector<SelfCheckEntry>& entries) {
  char buf[128];
  out << "suite                      measured      allowed       status\n";
  for (const SelfCheckEntry& entry : entries) {
    std::snprintf(buf, sizeof buf, "%-26s %-13.4g %-13.4g %s\n",
                  entry.suite.c_str(), entry.measured, entry.allowed,
                  entry.passed ? "pass" : "FAIL");
    out << buf;
  }
}

}  // namespace ars
