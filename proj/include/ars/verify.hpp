#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ars/pipeline.hpp"
#include "ars/radius.hpp"

namespace ars {

enum class AnalyticKind { kThreshold1D, kLinearProjection };

// A smoothed classifier whose class probabilities are available in closed
// form: the base rule reads a Gaussian-noised estimate of x with a known
// per-coordinate variance map. Ground truth for soundness checks; no
// sampling anywhere.
struct AnalyticSmoothedClassifier {
  AnalyticKind kind = AnalyticKind::kThreshold1D;
  double threshold = 0.0;                    // kThreshold1D: reads coordinate 0
  std::vector<double> v;                     // kLinearProjection weights
  std::vector<std::uint64_t> placement;      // coordinates v applies to
  std::vector<double> coordinate_variances;  // length d, all positive

  static AnalyticSmoothedClassifier threshold_1d(
      double threshold, std::vector<double> coordinate_variances);
  static AnalyticSmoothedClassifier linear_projection(
      std::vector<double> v, std::vector<std::uint64_t> placement,
      std::vector<double> coordinate_variances);

  void validate(std::size_t dimension) const;
};

// Exact P(class 1 | x) of the smoothed classifier.
double analytic_class_prob(const AnalyticSmoothedClassifier& c,
                           std::span<const double> x);

// Certificate from exact probabilities: no confidence slack, abstains only
// at p = 0.5 exactly. The pipeline spec supplies the noise budget the
// radius formulas charge for; norm selects the certificate (two-step
// specs certify kLinf only).
CertificationResult analytic_certify(const AnalyticSmoothedClassifier& c,
                                     std::span<const double> x,
                                     const PipelineSpec& spec, Norm norm);

// Searches the closed norm ball of the given radius for a perturbation
// flipping the smoothed argmax, exactly. For these classifier families the
// worst case lies along a known direction (the projection gradient), so
// the search walks that ray at `resolution` steps plus the endpoint.
// Returns the flipping perturbation, or nothing. Radius must be finite.
std::optional<std::vector<double>> brute_force_attack(
    const AnalyticSmoothedClassifier& c, std::span<const double> x,
    double radius, Norm norm, std::size_t resolution);

// Trade-off curve of one joint test against two independent Gaussian
// observations with unit variance and mean shifts mu1, mu2, evaluated on
// alpha_grid. Computed by Neyman-Pearson reduction to the 1-D projection
// onto the mean-difference direction, with the rejection threshold found
// by bisection on the CDF; no quantile calls, so this is an independent
// route against the closed-form Gaussian curve.
std::vector<double> numeric_tradeoff_curve(double mu1, double mu2,
                                           std::span<const double> alpha_grid);

struct SweepReport {
  std::size_t configurations = 0;
  std::size_t emitted = 0;     // certificates with radius > 0
  std::size_t violations = 0;  // flips found inside a certified ball
};

// Random analytic configurations (both classifier kinds, both pipeline
// modes, d in {1, 4, 64}, random masks), certificate from exact
// probabilities, then the attack just inside the certified radius.
// radius_scale inflates the attacked radius; 1.0 checks soundness, values
// above 1 exist so tests can prove the attacker has teeth.
SweepReport analytic_soundness_sweep(std::uint64_t seed,
                                     std::size_t n_configurations,
                                     double radius_scale = 1.0);

// Monte-Carlo certification against analytic ground truth: certify() runs
// on threshold pipelines, then the exact-probability attacker probes just
// inside each emitted radius. Violations stay within the certification
// failure budget alpha (statistically).
SweepReport mc_soundness_sweep(std::uint64_t seed, std::size_t n_certifications,
                               std::uint64_t n0, std::uint64_t n, double alpha);

}  // namespace ars
