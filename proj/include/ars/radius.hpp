#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ars/pipeline.hpp"
#include "ars/rng.hpp"

namespace ars {

inline constexpr int kAbstain = -1;

// Probabilities are pulled this far away from {0, 1} before any quantile
// evaluation. Monte-Carlo bounds never reach the endpoints; exact analytic
// inputs of (1, 0) instead produce the +infinity sentinel.
inline constexpr double kProbabilityClampEpsilon = 1e-12;

enum class Norm { kL2, kLinf };
enum class CertifyMode { kTwoClassGrouping, kPairwiseBound };

struct CertificationResult {
  int predicted_label = kAbstain;
  double radius = 0.0;
  Norm norm = Norm::kLinf;
  double p_plus_lb = 0.0;
  std::uint64_t n0_used = 0;
  std::uint64_t n_used = 0;
  double alpha = 0.0;

  bool abstained() const { return predicted_label == kAbstain; }
};

// r = sigma/2 (Phi^{-1}(p_plus_lb) - Phi^{-1}(p_minus_ub)), floored at 0.
// Requires sigma > 0 and 0 <= p_minus_ub <= p_plus_lb <= 1. Exact
// separation (1, 0) returns +infinity.
double radius_l2_rs(double sigma, double p_plus_lb, double p_minus_ub);

// A chain of Gaussian steps certifies exactly like one step at the
// effective scale 1/sqrt(sum sigma_i^-2); adaptivity costs nothing.
double radius_l2_adaptive(std::span<const double> sigmas, double p_plus_lb,
                          double p_minus_ub);

// L-infinity certificate of one isotropic step: the L2 radius shrunk by
// sqrt(d).
double radius_linf_rs(double sigma, std::uint64_t d, double p_plus_lb,
                      double p_minus_ub);

// L-infinity certificate of the two-step mechanism; holds for any mask
// policy because the budget accounting is mask-independent.
double radius_linf_two_step(double sigma1, double sigma2, std::uint64_t d,
                            double p_plus_lb, double p_minus_ub);

// Monte-Carlo certification. Draws n0 selection samples, picks the top
// class (ties to the lowest index), then bounds its probability from n
// fresh samples via the one-sided Clopper-Pearson bound at level alpha.
// TwoClassGrouping folds every other class into one adversary with
// p_minus_ub = 1 - p_plus_lb and abstains unless p_plus_lb > 0.5;
// PairwiseBound spends alpha/2 on each of (top lower, runner-up upper)
// and abstains when the interval gate fails at radius 0.
//
// Sampling uses child streams of rng (stream j for draw j), so a run is
// reproducible for a given (seed, stream) regardless of evaluation order;
// pass a distinct stream per certification.
//
// norm selects the certificate: PlainRs supports both norms, TwoStepArs
// only kLinf (a masked two-step L2 certificate is not available).
CertificationResult certify(const SmoothedPipeline& classifier,
                            std::span<const double> x, std::uint64_t n0,
                            std::uint64_t n, double alpha, SeededRng& rng,
                            CertifyMode mode = CertifyMode::kTwoClassGrouping,
                            Norm norm = Norm::kLinf);

struct CurvePoint {
  double radius = 0.0;
  double accuracy = 0.0;
};

// Certified accuracy at each grid radius: the fraction of samples whose
// prediction matches the label (abstentions never match) and whose
// certificate covers the radius (inclusive). Grid must be sorted
// ascending; results and labels must have equal, nonzero length.
std::vector<CurvePoint> certified_accuracy_curve(
    std::span<const CertificationResult> results, std::span<const int> labels,
    std::span<const double> radius_grid);

}  // namespace ars
