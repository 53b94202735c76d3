#include "ars/radius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "ars/stats.hpp"

namespace ars {
namespace {

void check_probability_pair(double p_plus_lb, double p_minus_ub) {
  if (!(p_plus_lb >= 0.0 && p_plus_lb <= 1.0 && p_minus_ub >= 0.0 &&
        p_minus_ub <= 1.0)) {
    throw std::invalid_argument("radius: probabilities outside [0, 1]");
  }
  if (!(p_minus_ub <= p_plus_lb)) {
    throw std::invalid_argument("radius: p_minus_ub exceeds p_plus_lb");
  }
}

// Quantile of p pulled back from the endpoints by the clamp epsilon. The
// upper clamp is applied through the exact complement 1 - p, so clamping
// at 1 mirrors clamping at 0 bit for bit; forming 1 - epsilon directly
// would round and shift the deep-tail quantile by more than 1e-6.
double clamped_quantile(double p) {
  if (p > 0.5) return -clamped_quantile(1.0 - p);
  return std_normal_quantile(std::max(kProbabilityClampEpsilon, p));
}

}  // namespace

double radius_l2_rs(double sigma, double p_plus_lb, double p_minus_ub) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("radius_l2_rs: sigma must be positive");
  }
  check_probability_pair(p_plus_lb, p_minus_ub);
  if (p_plus_lb == 1.0 && p_minus_ub == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double margin =
      clamped_quantile(p_plus_lb) - clamped_quantile(p_minus_ub);
  return std::max(0.0, 0.5 * sigma * margin);
}

double radius_l2_adaptive(std::span<const double> sigmas, double p_plus_lb,
                          double p_minus_ub) {
  if (sigmas.empty()) {
    throw std::invalid_argument("radius_l2_adaptive: empty sigma list");
  }
  double inverse_sum = 0.0;
  for (double s : sigmas) {
    if (!(s > 0.0)) {
      throw std::invalid_argument("radius_l2_adaptive: sigma must be positive");
    }
    inverse_sum += 1.0 / (s * s);
  }
  return radius_l2_rs(1.0 / std::sqrt(inverse_sum), p_plus_lb, p_minus_ub);
}

double radius_linf_rs(double sigma, std::uint64_t d, double p_plus_lb,
                      double p_minus_ub) {
  if (d == 0) {
    throw std::invalid_argument("radius_linf_rs: d must be at least 1");
  }
  return radius_l2_rs(sigma, p_plus_lb, p_minus_ub) /
         std::sqrt(static_cast<double>(d));
}

double radius_linf_two_step(double sigma1, double sigma2, std::uint64_t d,
                            double p_plus_lb, double p_minus_ub) {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("radius_linf_two_step: scales must be positive");
  }
  const double effective =
      1.0 / std::sqrt(1.0 / (sigma1 * sigma1) + 1.0 / (sigma2 * sigma2));
  return radius_linf_rs(effective, d, p_plus_lb, p_minus_ub);
}

CertificationResult certify(const SmoothedPipeline& classifier,
                            std::span<const double> x, std::uint64_t n0,
                            std::uint64_t n, double alpha, SeededRng& rng,
                            CertifyMode mode, Norm norm) {
  if (n0 == 0 || n == 0) {
    throw std::invalid_argument("certify: n0 and n must be at least 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("certify: alpha outside (0, 1)");
  }
  if (classifier.spec.mode == PipelineMode::kTwoStepArs && norm == Norm::kL2) {
    throw std::invalid_argument(
        "certify: two-step pipelines certify the Linf norm only");
  }

  // Selection round: draw j uses child stream j, so evaluation order never
  // changes the outcome.
  std::map<int, std::uint64_t> selection_counts;
  for (std::uint64_t j = 0; j < n0; ++j) {
    SeededRng draw_rng = rng.stream(j);
    selection_counts[classifier.sample_label(x, draw_rng)] += 1;
  }
  int top_class = 0;
  std::uint64_t top_count = 0;
  for (const auto& [label, count] : selection_counts) {
    if (count > top_count) {
      top_class = label;
      top_count = count;
    }
  }

  // Estimation round on fresh streams.
  std::map<int, std::uint64_t> estimation_counts;
  for (std::uint64_t j = 0; j < n; ++j) {
    SeededRng draw_rng = rng.stream(n0 + j);
    estimation_counts[classifier.sample_label(x, draw_rng)] += 1;
  }
  const std::uint64_t hits = estimation_counts[top_class];

  CertificationResult result;
  result.norm = norm;
  result.n0_used = n0;
  result.n_used = n;
  result.alpha = alpha;

  double p_plus_lb = 0.0;
  double p_minus_ub = 1.0;
  bool certified = false;
  if (mode == CertifyMode::kTwoClassGrouping) {
    p_plus_lb = binomial_lower_bound(hits, n, alpha);
    p_minus_ub = 1.0 - p_plus_lb;
    certified = p_plus_lb > 0.5;
  } else {
    p_plus_lb = binomial_lower_bound(hits, n, alpha / 2.0);
    std::uint64_t runner_up_count = 0;
    for (const auto& [label, count] : estimation_counts) {
      if (label != top_class && count > runner_up_count) {
        runner_up_count = count;
      }
    }
    p_minus_ub = binomial_upper_bound(runner_up_count, n, alpha / 2.0);
    certified = p_plus_lb > p_minus_ub;
  }
  result.p_plus_lb = p_plus_lb;
  if (!certified) {
    return result;  // ABSTAIN: label stays kAbstain, radius stays 0.
  }

  result.predicted_label = top_class;
  const PipelineSpec& spec = classifier.spec;
  if (spec.mode == PipelineMode::kPlainRs) {
    result.radius = norm == Norm::kL2
                        ? radius_l2_rs(spec.sigma, p_plus_lb, p_minus_ub)
                        : radius_linf_rs(spec.sigma, spec.dimension, p_plus_lb,
                                         p_minus_ub);
  } else {
    result.radius = radius_linf_two_step(spec.sigma1, spec.sigma2,
                                         spec.dimension, p_plus_lb, p_minus_ub);
  }
  return result;
}

std::vector<CurvePoint> certified_accuracy_curve(
    std::span<const CertificationResult> results, std::span<const int> labels,
    std::span<const double> radius_grid) {
  if (results.size() != labels.size()) {
    throw std::invalid_argument("certified_accuracy_curve: length mismatch");
  }
  if (results.empty()) {
    throw std::invalid_argument("certified_accuracy_curve: empty results");
  }
  if (!std::is_sorted(radius_grid.begin(), radius_grid.end())) {
    throw std::invalid_argument("certified_accuracy_curve: unsorted grid");
  }
  std::vector<CurvePoint> curve;
  curve.reserve(radius_grid.size());
  const double total = static_cast<double>(results.size());
  for (double r : radius_grid) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const CertificationResult& res = results[i];
      if (!res.abstained() && res.predicted_label == labels[i] &&
          res.radius >= r) {
        hit += 1;
      }
    }
    curve.push_back({r, static_cast<double>(hit) / total});
  }
  return curve;
}

}  // namespace ars
