#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ars/pipeline.hpp"
#include "ars/rng.hpp"

namespace ars {

// One sample of the distractor task: a k-dimensional signal window placed
// at a random offset inside a d-dimensional standard-normal background.
// The label is a function of x restricted to the window alone.
struct BenchInstance {
  std::vector<double> x;
  int label = 0;
  std::vector<std::uint64_t> relevant;  // contiguous, ascending
  std::uint64_t offset = 0;
};

enum class MaskKind {
  kAllOnes,
  kOracleIndicator,
  kEnergyWindow,
  kStaticLearnedStub,
};

// The fixed signal direction: k equal weights normalized to unit L2 norm.
std::vector<double> signal_weights(std::uint64_t k);

// Generates n_samples instances. Window content is a Gaussian component
// along v conditioned on |v.x_rel| >= signal_margin (rejection sampling,
// sign alternated for exact label balance) plus a loud alternating
// pattern orthogonal to v that makes the window energetically visible
// without moving the classification projection. Distractor coordinates
// are i.i.d. standard normal; offsets are uniform over the d - k + 1
// placements.
std::vector<BenchInstance> generate_distractor_task(std::uint64_t d,
                                                    std::uint64_t k,
                                                    std::uint64_t n_samples,
                                                    double signal_margin,
                                                    SeededRng& rng);

// Indicator of the instance's true window; |w|^2 = k. Stands in for a
// perfectly trained mask model.
MaskVector oracle_mask(const BenchInstance& instance);

// Adaptive mask computable from the first noisy observation only: the
// indicator of the width-window_k window maximizing in-window energy
// (ties to the lowest offset). Never sees x or the instance.
MaskVector energy_window_mask(std::span<const double> m1,
                              std::uint64_t window_k);

// sign(sum_j v[j] * x_hat[placement[j]]); an exact zero projection maps
// to class 0.
BaseClassifier linear_base_classifier(std::vector<double> v,
                                      std::vector<std::uint64_t> placement);

// Fixed mask learned from a training split: the coordinate-wise average
// of the oracle indicators. Stand-in for a static learned mask baseline.
MaskVector static_stub_mask(std::span<const BenchInstance> training);

// Mask-function factories matching MaskKind.
MaskFunction all_ones_mask_fn(std::uint64_t d);
MaskFunction oracle_mask_fn(const BenchInstance& instance);
MaskFunction energy_window_mask_fn(std::uint64_t window_k);
MaskFunction fixed_mask_fn(MaskVector mask);

// CSV round trip: one row per instance, columns d, k, offset, label then
// the d coordinates; doubles carry full precision.
void export_dataset_csv(std::ostream& out,
                        std::span<const BenchInstance> instances,
                        std::uint64_t k);
std::vector<BenchInstance> import_dataset_csv(std::istream& in);

}  // namespace ars
