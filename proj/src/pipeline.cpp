#include "ars/pipeline.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace ars {
namespace {

void check_mask_values(const MaskVector& mask) {
  for (double v : mask.w) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("mask weight outside [0, 1]");
    }
  }
}

}  // namespace

PipelineSpec PipelineSpec::plain_rs(double sigma, std::uint64_t dimension) {
  PipelineSpec spec;
  spec.sigma = sigma;
  spec.dimension = dimension;
  spec.mode = PipelineMode::kPlainRs;
  spec.validate();
  return spec;
}

PipelineSpec PipelineSpec::two_step(double sigma, double sigma1,
                                    std::uint64_t dimension) {
  PipelineSpec spec;
  spec.sigma = sigma;
  spec.sigma1 = sigma1;
  spec.sigma2 = split_budget(sigma, sigma1);
  spec.dimension = dimension;
  spec.mode = PipelineMode::kTwoStepArs;
  spec.validate();
  return spec;
}

void PipelineSpec::validate() const {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("PipelineSpec: sigma must be positive");
  }
  if (dimension == 0) {
    throw std::invalid_argument("PipelineSpec: dimension must be positive");
  }
  if (mode == PipelineMode::kTwoStepArs) {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
      throw std::invalid_argument("PipelineSpec: step scales must be positive");
    }
    const double budget = 1.0 / (sigma1 * sigma1) + 1.0 / (sigma2 * sigma2);
    const double target = 1.0 / (sigma * sigma);
    if (std::fabs(budget - target) > 1e-9 * target) {
      throw std::invalid_argument("PipelineSpec: step scales overspend sigma");
    }
  }
}

double MaskVector::squared_norm() const {
  double total = 0.0;
  for (double v : w) total += v * v;
  return total;
}

double split_budget(double sigma, double sigma1) {
  if (!(sigma > 0.0) || !(sigma1 > sigma)) {
    throw std::invalid_argument("split_budget: need sigma1 > sigma > 0");
  }
  return 1.0 / std::sqrt(1.0 / (sigma * sigma) - 1.0 / (sigma1 * sigma1));
}

std::vector<double> step1(std::span<const double> x, double sigma1,
                          SeededRng& rng) {
  if (!(sigma1 > 0.0)) {
    throw std::invalid_argument("step1: sigma1 must be positive");
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = x[i] + sigma1 * rng.next_normal();
  }
  return out;
}

std::vector<double> step2(std::span<const double> x, const MaskVector& w,
                          double sigma2, SeededRng& rng) {
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("step2: sigma2 must be positive");
  }
  if (w.size() != x.size()) {
    throw std::invalid_argument("step2: mask size mismatch");
  }
  check_mask_values(w);
  const double d = static_cast<double>(x.size());
  const double s2 = sigma2 * std::sqrt(w.squared_norm() / d);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = w.w[i] * x[i] + s2 * rng.next_normal();
  }
  return out;
}

FusionCoefficients fusion_coefficients(double w_i, double step2_var,
                                       double sigma1) {
  if (!(w_i >= 0.0 && w_i <= 1.0)) {
    throw std::invalid_argument("fusion_coefficients: weight outside [0, 1]");
  }
  if (!(sigma1 > 0.0) || !(step2_var >= 0.0)) {
    throw std::invalid_argument("fusion_coefficients: bad variances");
  }
  // Minimum-variance unbiased pair subject to c1 + w * c2 = 1:
  //   c1 = s2^2 / (sigma1^2 w^2 + s2^2),  c2 = sigma1^2 w / (same).
  // Degenerate corners keep unbiasedness: a dead coordinate (w = 0) falls
  // back to the first observation; a noiseless second step inverts it.
  if (w_i == 0.0) return {1.0, 0.0};
  const double var1 = sigma1 * sigma1;
  if (step2_var == 0.0) return {0.0, 1.0 / w_i};
  const double denom = var1 * w_i * w_i + step2_var;
  const double c2 = var1 * w_i / denom;
  // Computing c1 through the constraint keeps c1 + w * c2 = 1 exact in
  // floating point.
  const double c1 = 1.0 - w_i * c2;
  return {c1, c2};
}

FusedObservation fuse(std::vector<double> m1, std::vector<double> m2,
                      MaskVector mask, double sigma1, double sigma2) {
  if (m1.size() != m2.size() || m1.size() != mask.size()) {
    throw std::invalid_argument("fuse: size mismatch");
  }
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("fuse: scales must be positive");
  }
  check_mask_values(mask);
  const double d = static_cast<double>(m1.size());
  const double step2_var =
      mask.squared_norm() / d * (sigma2 * sigma2);
  FusedObservation fused;
  fused.x_hat.resize(m1.size());
  for (std::size_t i = 0; i < m1.size(); ++i) {
    const FusionCoefficients c =
        fusion_coefficients(mask.w[i], step2_var, sigma1);
    fused.x_hat[i] = c.c1 * m1[i] + c.c2 * m2[i];
  }
  fused.m1 = std::move(m1);
  fused.m2 = std::move(m2);
  fused.mask = std::move(mask);
  return fused;
}

std::vector<double> fused_coordinate_variances(const PipelineSpec& spec,
                                               const MaskVector& mask) {
  spec.validate();
  if (mask.size() != spec.dimension) {
    throw std::invalid_argument("fused_coordinate_variances: size mismatch");
  }
  if (spec.mode == PipelineMode::kPlainRs) {
    return std::vector<double>(mask.size(), spec.sigma * spec.sigma);
  }
  check_mask_values(mask);
  const double d = static_cast<double>(mask.size());
  const double step2_var =
      mask.squared_norm() / d * (spec.sigma2 * spec.sigma2);
  std::vector<double> out(mask.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const FusionCoefficients c =
        fusion_coefficients(mask.w[i], step2_var, spec.sigma1);
    out[i] = c.c1 * c.c1 * spec.sigma1 * spec.sigma1 +
             c.c2 * c.c2 * step2_var;
  }
  return out;
}

int pipeline_sample(const PipelineSpec& spec, std::span<const double> x,
                    const MaskFunction& mask_fn, const BaseClassifier& base,
                    SeededRng& rng) {
  if (x.size() != spec.dimension) {
    throw std::invalid_argument("pipeline_sample: input size mismatch");
  }
  if (spec.mode == PipelineMode::kPlainRs) {
    std::vector<double> noisy(x.size());
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      noisy[i] = x[i] + spec.sigma * rng.next_normal();
    }
    return base(noisy);
  }
  std::vector<double> m1 = step1(x, spec.sigma1, rng);
  MaskVector mask = mask_fn(m1);
  if (mask.size() != x.size()) {
    throw std::invalid_argument("pipeline_sample: mask size mismatch");
  }
  std::vector<double> m2 = step2(x, mask, spec.sigma2, rng);
  FusedObservation fused =
      fuse(std::move(m1), std::move(m2), std::move(mask), spec.sigma1,
           spec.sigma2);
  return base(fused.x_hat);
}

}  // namespace ars
