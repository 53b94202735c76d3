#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ars/rng.hpp"

namespace ars {

enum class PipelineMode { kPlainRs, kTwoStepArs };

// Noise configuration of one smoothed classifier. For kPlainRs only sigma
// and dimension are read. For kTwoStepArs the two step scales must satisfy
// 1/sigma1^2 + 1/sigma2^2 = 1/sigma^2, i.e. the steps jointly spend the
// total budget sigma; use the factories to keep that in force.
struct PipelineSpec {
  double sigma = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  std::uint64_t dimension = 0;
  PipelineMode mode = PipelineMode::kPlainRs;

  static PipelineSpec plain_rs(double sigma, std::uint64_t dimension);

  // Two-step spec with sigma2 derived from the remaining budget. The
  // common choice sigma1 = sqrt(2) * sigma gives sigma2 = sigma1.
  static PipelineSpec two_step(double sigma, double sigma1,
                               std::uint64_t dimension);

  void validate() const;
};

// Per-coordinate mask weights in [0, 1]. Values outside that range are a
// contract violation by the producer and are rejected, never clamped.
struct MaskVector {
  std::vector<double> w;

  double squared_norm() const;
  std::size_t size() const { return w.size(); }
};

using MaskFunction = std::function<MaskVector(std::span<const double>)>;
using BaseClassifier = std::function<int(std::span<const double>)>;

// Unbiased fusion weights for one coordinate: c1 * m1 + c2 * m2 estimates
// x from m1 = x + e1 and m2 = w * x + e2 with c1 + w * c2 = 1, picking the
// variance-minimizing pair. step2_var is the per-coordinate variance of
// the second observation.
struct FusionCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
};

FusionCoefficients fusion_coefficients(double w_i, double step2_var,
                                       double sigma1);

// Remaining budget after spending sigma1 of sigma: the sigma2 with
// 1/sigma1^2 + 1/sigma2^2 = 1/sigma^2. Requires sigma1 > sigma > 0;
// throws std::invalid_argument otherwise (sigma1 == sigma would leave
// nothing for the second step).
double split_budget(double sigma, double sigma1);

// First observation: x + N(0, sigma1^2 I).
std::vector<double> step1(std::span<const double> x, double sigma1,
                          SeededRng& rng);

// Second observation: w * x + N(0, s2^2 I) with the standardized scale
// s2^2 = (|w|^2 / d) * sigma2^2. A zero mask yields pure noise but is
// permitted; the fusion stage then ignores this observation.
std::vector<double> step2(std::span<const double> x, const MaskVector& w,
                          double sigma2, SeededRng& rng);

struct FusedObservation {
  std::vector<double> x_hat;
  std::vector<double> m1;
  std::vector<double> m2;
  MaskVector mask;
};

// Coordinate-wise minimum-variance unbiased combination of the two
// observations under the standardized step-2 scale.
FusedObservation fuse(std::vector<double> m1, std::vector<double> m2,
                      MaskVector mask, double sigma1, double sigma2);

// Variance of each fused coordinate, for a fixed mask. PlainRs: sigma^2
// everywhere. TwoStepArs: c1^2 sigma1^2 + c2^2 s2^2 with the coefficients
// above. This is what a downstream linear functional of x_hat sees.
std::vector<double> fused_coordinate_variances(const PipelineSpec& spec,
                                               const MaskVector& mask);

// One draw of the full randomized classifier. PlainRs: base(x + sigma z).
// TwoStepArs: step1, mask_fn on the first observation only, step2, fuse,
// then base on the fused estimate. Throws std::invalid_argument when the
// mask function returns a wrongly sized vector or weights outside [0, 1].
int pipeline_sample(const PipelineSpec& spec, std::span<const double> x,
                    const MaskFunction& mask_fn, const BaseClassifier& base,
                    SeededRng& rng);

// A spec bundled with its mask and base classifier; the unit certify()
// consumes.
struct SmoothedPipeline {
  PipelineSpec spec;
  MaskFunction mask_fn;
  BaseClassifier base;

  int sample_label(std::span<const double> x, SeededRng& rng) const {
    return pipeline_sample(spec, x, mask_fn, base, rng);
  }
};

}  // namespace ars
