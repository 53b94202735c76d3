#include "ars/bench.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace ars {
namespace {

// Per-coordinate amplitude of the orthogonal loud pattern. Large enough
// that the window's energy stands out from unit-variance distractors at
// every benchmark scale, small enough to keep the arithmetic tame.
constexpr double kLoudAmplitude = 3.5;

// Uniform integer in [0, range) from one 64-bit draw (fixed-point
// multiply; bias is below 2^-64 times range and irrelevant here).
std::uint64_t bounded_u64(SeededRng& rng, std::uint64_t range) {
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(rng.next_u64()) * range;
  return static_cast<std::uint64_t>(wide >> 64);
}

int label_from_window(std::span<const double> v,
                      std::span<const double> window) {
  double proj = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) proj += v[j] * window[j];
  return proj > 0.0 ? 1 : 0;
}

}  // namespace

std::vector<double> signal_weights(std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("signal_weights: k must be positive");
  return std::vector<double>(k, 1.0 / std::sqrt(static_cast<double>(k)));
}

std::vector<BenchInstance> generate_distractor_task(std::uint64_t d,
                                                    std::uint64_t k,
                                                    std::uint64_t n_samples,
                                                    double signal_margin,
                                                    SeededRng& rng) {
  if (k == 0 || k > d) {
    throw std::invalid_argument("generate_distractor_task: need 1 <= k <= d");
  }
  if (!(signal_margin > 0.0)) {
    throw std::invalid_argument("generate_distractor_task: margin must be positive");
  }
  const std::vector<double> v = signal_weights(k);
  const double inv_sqrt_k = v[0];
  std::vector<BenchInstance> out;
  out.reserve(n_samples);
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    BenchInstance inst;
    inst.offset = bounded_u64(rng, d - k + 1);
    inst.relevant.resize(k);
    for (std::uint64_t j = 0; j < k; ++j) inst.relevant[j] = inst.offset + j;

    // Window = margin-conditioned Gaussian along v + loud pattern
    // orthogonal to v. Alternating the target sign balances the labels
    // exactly; negating a standard normal vector preserves its law.
    std::vector<double> window(k);
    double proj = 0.0;
    do {
      proj = 0.0;
      for (std::uint64_t j = 0; j < k; ++j) {
        window[j] = rng.next_normal();
        proj += window[j] * inv_sqrt_k;
      }
    } while (std::fabs(proj) < signal_margin);
    const bool want_positive = (i % 2) == 0;
    if (want_positive != (proj > 0.0)) {
      for (double& w : window) w = -w;
    }
    const std::uint64_t paired = k - (k % 2);
    for (std::uint64_t j = 0; j < paired; ++j) {
      window[j] += (j % 2) == 0 ? kLoudAmplitude : -kLoudAmplitude;
    }

    inst.x.resize(d);
    for (std::uint64_t j = 0; j < d; ++j) inst.x[j] = rng.next_normal();
    for (std::uint64_t j = 0; j < k; ++j) inst.x[inst.offset + j] = window[j];
    inst.label = label_from_window(v, window);
    out.push_back(std::move(inst));
  }
  return out;
}

MaskVector oracle_mask(const BenchInstance& instance) {
  MaskVector mask;
  mask.w.assign(instance.x.size(), 0.0);
  for (std::uint64_t idx : instance.relevant) mask.w[idx] = 1.0;
  return mask;
}

MaskVector energy_window_mask(std::span<const double> m1,
                              std::uint64_t window_k) {
  const std::uint64_t d = m1.size();
  if (window_k == 0 || window_k > d) {
    throw std::invalid_argument("energy_window_mask: need 1 <= window_k <= d");
  }
  double energy = 0.0;
  for (std::uint64_t j = 0; j < window_k; ++j) energy += m1[j] * m1[j];
  double best_energy = energy;
  std::uint64_t best_offset = 0;
  for (std::uint64_t off = 1; off + window_k <= d; ++off) {
    energy += m1[off + window_k - 1] * m1[off + window_k - 1] -
              m1[off - 1] * m1[off - 1];
    if (energy > best_energy) {
      best_energy = energy;
      best_offset = off;
    }
  }
  MaskVector mask;
  mask.w.assign(d, 0.0);
  for (std::uint64_t j = 0; j < window_k; ++j) mask.w[best_offset + j] = 1.0;
  return mask;
}

BaseClassifier linear_base_classifier(std::vector<double> v,
                                      std::vector<std::uint64_t> placement) {
  if (v.empty() || v.size() != placement.size()) {
    throw std::invalid_argument("linear_base_classifier: bad weight/placement");
  }
  bool nonzero = false;
  for (double w : v) nonzero |= w != 0.0;
  if (!nonzero) {
    throw std::invalid_argument("linear_base_classifier: zero weights");
  }
  return [v = std::move(v),
          placement = std::move(placement)](std::span<const double> x) {
    double proj = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) proj += v[j] * x[placement[j]];
    return proj > 0.0 ? 1 : 0;
  };
}

MaskVector static_stub_mask(std::span<const BenchInstance> training) {
  if (training.empty()) {
    throw std::invalid_argument("static_stub_mask: empty training split");
  }
  MaskVector mask;
  mask.w.assign(training[0].x.size(), 0.0);
  for (const BenchInstance& inst : training) {
    for (std::uint64_t idx : inst.relevant) mask.w[idx] += 1.0;
  }
  const double scale = 1.0 / static_cast<double>(training.size());
  for (double& w : mask.w) w *= scale;
  return mask;
}

MaskFunction all_ones_mask_fn(std::uint64_t d) {
  return [d](std::span<const double>) {
    MaskVector mask;
    mask.w.assign(d, 1.0);
    return mask;
  };
}

MaskFunction oracle_mask_fn(const BenchInstance& instance) {
  return fixed_mask_fn(oracle_mask(instance));
}

MaskFunction energy_window_mask_fn(std::uint64_t window_k) {
  return [window_k](std::span<const double> m1) {
    return energy_window_mask(m1, window_k);
  };
}

MaskFunction fixed_mask_fn(MaskVector mask) {
  return [mask = std::move(mask)](std::span<const double>) { return mask; };
}

void export_dataset_csv(std::ostream& out,
                        std::span<const BenchInstance> instances,
                        std::uint64_t k) {
  out << "d,k,offset,label,x\n";
  char buf[32];
  for (const BenchInstance& inst : instances) {
    out << inst.x.size() << ',' << k << ',' << inst.offset << ','
        << inst.label;
    for (double value : inst.x) {
      std::snprintf(buf, sizeof buf, "%.17g", value);
      out << ',' << buf;
    }
    out << '\n';
  }
}

std::vector<BenchInstance> import_dataset_csv(std::istream& in) {
  std::vector<BenchInstance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no += 1;
    if (line.empty() || line[0] == '#' || line.rfind("d,", 0) == 0) continue;
    std::istringstream row(line);
    std::string field;
    const auto next_field = [&]() {
      if (!std::getline(row, field, ',')) {
        throw std::runtime_error("dataset csv: truncated row at line " +
                                 std::to_string(line_no));
      }
      return field;
    };
    BenchInstance inst;
    try {
      const std::uint64_t d = std::stoull(next_field());
      const std::uint64_t k = std::stoull(next_field());
      inst.offset = std::stoull(next_field());
      inst.label = std::stoi(next_field());
      if (k == 0 || k > d || inst.offset + k > d) {
        throw std::runtime_error("dataset csv: inconsistent geometry at line " +
                                 std::to_string(line_no));
      }
      inst.x.reserve(d);
      for (std::uint64_t j = 0; j < d; ++j) {
        inst.x.push_back(std::stod(next_field()));
      }
      inst.relevant.resize(k);
      for (std::uint64_t j = 0; j < k; ++j) inst.relevant[j] = inst.offset + j;
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception&) {
      throw std::runtime_error("dataset csv: malformed number at line " +
                               std::to_string(line_no));
    }
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace ars
