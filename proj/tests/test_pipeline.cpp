#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "ars/pipeline.hpp"
#include "ars/rng.hpp"

using ars::fuse;
using ars::fused_coordinate_variances;
using ars::FusedObservation;
using ars::fusion_coefficients;
using ars::FusionCoefficients;
using ars::MaskVector;
using ars::pipeline_sample;
using ars::PipelineMode;
using ars::PipelineSpec;
using ars::SeededRng;
using ars::split_budget;
using ars::step1;
using ars::step2;

namespace {

ars::MaskFunction ones_mask() {
  return [](std::span<const double> m1) {
    MaskVector mask;
    mask.w.assign(m1.size(), 1.0);
    return mask;
  };
}

}  // namespace

TEST_CASE("split budget matches reference value and round-trips") {
  CHECK(std::fabs(split_budget(1.0, 2.0) - 1.1547005383792515) <= 1e-12);

  SeededRng rng(29, 11);
  for (int trial = 0; trial < 200; ++trial) {
    const double sigma = 0.2 + 1.8 * rng.next_uniform();
    const double sigma1 = sigma * (1.01 + 3.0 * rng.next_uniform());
    const double sigma2 = split_budget(sigma, sigma1);
    CHECK(sigma2 > 0.0);
    const double budget = 1.0 / (sigma1 * sigma1) + 1.0 / (sigma2 * sigma2);
    const double target = 1.0 / (sigma * sigma);
    CHECK(std::fabs(budget - target) <= 1e-12 * target);
  }
}

TEST_CASE("split budget requires sigma1 above sigma") {
  CHECK_THROWS_AS((void)split_budget(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)split_budget(1.0, 0.9), std::invalid_argument);
  CHECK_THROWS_AS((void)split_budget(0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS((void)split_budget(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("pipeline specs enforce the budget identity") {
  const PipelineSpec two = PipelineSpec::two_step(0.5, 0.75, 8);
  CHECK(two.sigma2 == split_budget(0.5, 0.75));
  CHECK(two.mode == PipelineMode::kTwoStepArs);

  PipelineSpec broken = two;
  broken.sigma2 *= 1.001;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

  CHECK_THROWS_AS((void)PipelineSpec::plain_rs(0.0, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)PipelineSpec::plain_rs(0.5, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)PipelineSpec::two_step(0.5, 0.4, 4),
                  std::invalid_argument);
}

TEST_CASE("the common equal split leaves sigma1 equal to sigma2") {
  const double sigma = 0.5;
  const double sigma1 = std::sqrt(2.0) * sigma;
  const PipelineSpec spec = PipelineSpec::two_step(sigma, sigma1, 4);
  CHECK(std::fabs(spec.sigma2 - sigma1) <= 1e-12);
}

TEST_CASE("fusion coefficients satisfy the unbiasedness constraint exactly") {
  SeededRng rng(41, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const double w = rng.next_uniform();
    const double s2_var = 2.0 * rng.next_uniform();
    const double sigma1 = 0.2 + 1.8 * rng.next_uniform();
    const FusionCoefficients c = fusion_coefficients(w, s2_var, sigma1);
    CHECK(c.c1 + w * c.c2 == 1.0);
  }
}

TEST_CASE("fusion coefficients minimize the fused variance") {
  SeededRng rng(41, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const double w = 0.01 + 0.99 * rng.next_uniform();
    const double s2_var = 0.01 + 2.0 * rng.next_uniform();
    const double sigma1 = 0.2 + 1.8 * rng.next_uniform();
    const double var1 = sigma1 * sigma1;
    const FusionCoefficients c = fusion_coefficients(w, s2_var, sigma1);

    const auto variance_at = [&](double c2) {
      const double c1 = 1.0 - w * c2;  // stay on the unbiased line
      return c1 * c1 * var1 + c2 * c2 * s2_var;
    };
    const double best = variance_at(c.c2);
    // The objective is a parabola in c2 with curvature w^2 var1 + s2_var,
    // so any perturbation must cost at least curvature * delta^2.
    const double curvature = w * w * var1 + s2_var;
    const double delta = 1e-3;
    CHECK(variance_at(c.c2 + delta) - best >=
          0.999 * curvature * delta * delta);
    CHECK(variance_at(c.c2 - delta) - best >=
          0.999 * curvature * delta * delta);
  }
}

TEST_CASE("fusion coefficient corners keep unbiasedness") {
  const FusionCoefficients dead = fusion_coefficients(0.0, 1.0, 1.0);
  CHECK(dead.c1 == 1.0);
  CHECK(dead.c2 == 0.0);

  const FusionCoefficients exact = fusion_coefficients(0.5, 0.0, 1.0);
  CHECK(exact.c1 == 0.0);
  CHECK(exact.c2 == 2.0);

  CHECK_THROWS_AS((void)fusion_coefficients(1.5, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)fusion_coefficients(-0.1, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)fusion_coefficients(0.5, -1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)fusion_coefficients(0.5, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("fused variances match the closed form") {
  const PipelineSpec spec = PipelineSpec::two_step(0.5, 0.8, 6);
  MaskVector mask;
  mask.w = {1.0, 0.7, 0.3, 0.0, 1.0, 0.5};
  const std::vector<double> vars = fused_coordinate_variances(spec, mask);
  REQUIRE(vars.size() == 6);

  const double s2_var =
      mask.squared_norm() / 6.0 * (spec.sigma2 * spec.sigma2);
  const double var1 = spec.sigma1 * spec.sigma1;
  for (std::size_t j = 0; j < 6; ++j) {
    CAPTURE(j);
    const double w = mask.w[j];
    if (w == 0.0) {
      CHECK(vars[j] == var1);
      continue;
    }
    const double closed = var1 * s2_var / (var1 * w * w + s2_var);
    CHECK(vars[j] == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("a full mask reproduces the total budget variance") {
  // With w identically 1 the two observations fuse back to variance
  // sigma^2 per coordinate: adaptivity costs nothing.
  const PipelineSpec spec = PipelineSpec::two_step(0.5, 0.9, 8);
  MaskVector ones;
  ones.w.assign(8, 1.0);
  for (double var : fused_coordinate_variances(spec, ones)) {
    CHECK(var == doctest::Approx(0.25).epsilon(1e-12));
  }

  const PipelineSpec plain = PipelineSpec::plain_rs(0.7, 5);
  MaskVector any;
  any.w.assign(5, 0.3);
  for (double var : fused_coordinate_variances(plain, any)) {
    CHECK(var == 0.7 * 0.7);
  }
}

TEST_CASE("step2 standardizes the noise scale by the mask norm") {
  const std::vector<double> x = {1.0, -2.0, 0.5, 3.0};
  MaskVector mask;
  mask.w = {1.0, 0.0, 1.0, 0.0};
  const double sigma2 = 0.8;

  SeededRng rng(51, 3);
  const std::vector<double> m2 = step2(x, mask, sigma2, rng);

  SeededRng replay(51, 3);
  const double s2 = sigma2 * std::sqrt(mask.squared_norm() / 4.0);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(m2[j] == mask.w[j] * x[j] + s2 * replay.next_normal());
  }
}

TEST_CASE("step1 adds scaled noise coordinate-wise") {
  const std::vector<double> x = {0.5, -1.5};
  SeededRng rng(51, 4);
  const std::vector<double> m1 = step1(x, 0.6, rng);
  SeededRng replay(51, 4);
  CHECK(m1[0] == 0.5 + 0.6 * replay.next_normal());
  CHECK(m1[1] == -1.5 + 0.6 * replay.next_normal());
  CHECK_THROWS_AS((void)step1(x, 0.0, rng), std::invalid_argument);
}

TEST_CASE("masks outside the unit interval are rejected, not clamped") {
  const std::vector<double> x = {1.0, 2.0};
  SeededRng rng(51, 5);
  MaskVector high;
  high.w = {1.0, 1.0 + 1e-9};
  CHECK_THROWS_AS((void)step2(x, high, 0.5, rng), std::invalid_argument);
  MaskVector low;
  low.w = {-0.1, 0.5};
  CHECK_THROWS_AS((void)step2(x, low, 0.5, rng), std::invalid_argument);
  MaskVector wrong_size;
  wrong_size.w = {0.5};
  CHECK_THROWS_AS((void)step2(x, wrong_size, 0.5, rng),
                  std::invalid_argument);

  CHECK_THROWS_AS((void)fuse({1.0, 2.0}, {1.0, 2.0}, high, 0.5, 0.5),
                  std::invalid_argument);
}

TEST_CASE("fuse combines observations with the coefficient formulas") {
  MaskVector mask;
  mask.w = {1.0, 0.4, 0.0};
  const std::vector<double> m1 = {1.0, -0.5, 2.0};
  const std::vector<double> m2 = {0.9, -0.1, 0.3};
  const double sigma1 = 0.7;
  const double sigma2 = 0.9;

  const FusedObservation fused = fuse(m1, m2, mask, sigma1, sigma2);
  REQUIRE(fused.x_hat.size() == 3);
  const double s2_var = mask.squared_norm() / 3.0 * sigma2 * sigma2;
  for (std::size_t j = 0; j < 3; ++j) {
    const FusionCoefficients c =
        fusion_coefficients(mask.w[j], s2_var, sigma1);
    CHECK(fused.x_hat[j] == c.c1 * m1[j] + c.c2 * m2[j]);
  }
  CHECK(fused.m1 == m1);
  CHECK(fused.m2 == m2);
  CHECK(fused.mask.w == mask.w);

  CHECK_THROWS_AS((void)fuse({1.0}, {1.0, 2.0}, mask, sigma1, sigma2),
                  std::invalid_argument);
}

TEST_CASE("fusion is unbiased and matches the predicted variances") {
  const PipelineSpec spec = PipelineSpec::two_step(0.5, 0.75, 4);
  MaskVector mask;
  mask.w = {1.0, 0.5, 0.0, 1.0};
  const std::vector<double> x = {0.8, -1.2, 0.4, 2.0};
  const std::vector<double> predicted = fused_coordinate_variances(spec, mask);

  constexpr int kDraws = 200000;
  std::vector<double> sum(4, 0.0);
  std::vector<double> sum_sq(4, 0.0);
  SeededRng rng(61, 8);
  for (int trial = 0; trial < kDraws; ++trial) {
    const std::vector<double> m1 = step1(x, spec.sigma1, rng);
    const std::vector<double> m2 = step2(x, mask, spec.sigma2, rng);
    const FusedObservation fused =
        fuse(m1, m2, mask, spec.sigma1, spec.sigma2);
    for (std::size_t j = 0; j < 4; ++j) {
      sum[j] += fused.x_hat[j];
      sum_sq[j] += fused.x_hat[j] * fused.x_hat[j];
    }
  }
  for (std::size_t j = 0; j < 4; ++j) {
    CAPTURE(j);
    const double mean = sum[j] / kDraws;
    const double var = sum_sq[j] / kDraws - mean * mean;
    // 5-sigma band on the mean, 5% relative band on the variance.
    CHECK(std::fabs(mean - x[j]) <=
          5.0 * std::sqrt(predicted[j] / kDraws));
    CHECK(std::fabs(var - predicted[j]) <= 0.05 * predicted[j]);
  }
}

TEST_CASE("plain pipeline draws are reproducible from the stream") {
  const PipelineSpec spec = PipelineSpec::plain_rs(0.5, 3);
  const std::vector<double> x = {0.2, -0.4, 1.0};
  std::vector<double> seen;
  const ars::BaseClassifier capture = [&seen](std::span<const double> v) {
    seen.assign(v.begin(), v.end());
    return v[0] > 0.0 ? 1 : 0;
  };
  SeededRng rng(71, 2);
  const int label = pipeline_sample(spec, x, ones_mask(), capture, rng);

  SeededRng replay(71, 2);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(seen[j] == x[j] + 0.5 * replay.next_normal());
  }
  CHECK(label == (seen[0] > 0.0 ? 1 : 0));
}

TEST_CASE("two-step pipeline hands the mask only the first observation") {
  const PipelineSpec spec = PipelineSpec::two_step(0.5, 0.8, 3);
  const std::vector<double> x = {0.2, -0.4, 1.0};
  std::vector<double> mask_input;
  const ars::MaskFunction probe = [&mask_input](std::span<const double> m1) {
    mask_input.assign(m1.begin(), m1.end());
    MaskVector mask;
    mask.w.assign(m1.size(), 1.0);
    return mask;
  };
  SeededRng rng(71, 3);
  (void)pipeline_sample(spec, x,
                        probe, [](std::span<const double>) { return 0; }, rng);

  SeededRng replay(71, 3);
  const std::vector<double> m1 = step1(x, spec.sigma1, replay);
  CHECK(mask_input == m1);
}

TEST_CASE("pipeline rejects malformed masks and inputs") {
  const PipelineSpec spec = PipelineSpec::two_step(0.5, 0.8, 3);
  const std::vector<double> x = {0.2, -0.4, 1.0};
  SeededRng rng(71, 4);

  const ars::MaskFunction wrong_size = [](std::span<const double>) {
    MaskVector mask;
    mask.w = {1.0};
    return mask;
  };
  CHECK_THROWS_AS((void)pipeline_sample(spec, x, wrong_size,
                                        [](std::span<const double>) {
                                          return 0;
                                        },
                                        rng),
                  std::invalid_argument);

  const ars::MaskFunction out_of_range = [](std::span<const double> m1) {
    MaskVector mask;
    mask.w.assign(m1.size(), 2.0);
    return mask;
  };
  CHECK_THROWS_AS((void)pipeline_sample(spec, x, out_of_range,
                                        [](std::span<const double>) {
                                          return 0;
                                        },
                                        rng),
                  std::invalid_argument);

  const std::vector<double> short_x = {0.1};
  CHECK_THROWS_AS((void)pipeline_sample(spec, short_x, ones_mask(),
                                        [](std::span<const double>) {
                                          return 0;
                                        },
                                        rng),
                  std::invalid_argument);
}
