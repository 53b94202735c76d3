#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ars/bench.hpp"

namespace ars {

// Configuration error tied to one field; the CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ExperimentMode { kArs, kPlainRs, kStaticStub };

// Flat key = value experiment description. Defaults are desk scale; the
// full-scale certification protocol is one `n = 50000` away.
struct ExperimentConfig {
  double sigma = 0.5;
  double sigma1 = 0.0;  // 0 means: resolve to sqrt(2) * sigma
  std::uint64_t d = 256;
  std::uint64_t k = 16;
  std::uint64_t n0 = 100;
  std::uint64_t n = 10000;
  double alpha = 0.05;
  MaskKind mask_kind = MaskKind::kEnergyWindow;
  ExperimentMode mode = ExperimentMode::kArs;
  std::vector<std::uint64_t> seeds = {1};
  std::vector<double> radius_grid;  // empty: resolve to the default grid
  std::uint64_t sample_count = 100;
  double signal_margin = 1.0;
  std::uint64_t window_k = 0;  // 0 means: resolve to k
  std::uint64_t jobs = 1;

  // Fills derived defaults (sigma1, window_k, radius_grid) in place.
  void resolve();

  // Rejects the first invalid field with a field-level ConfigError.
  void validate() const;

  // One "key = value" line per field, fixed order, full precision.
  // resolve() + serialize + parse + serialize is byte-stable.
  std::string serialize() const;

  void set_field(const std::string& key, const std::string& value);

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig from_file(const std::string& path);
};

std::string to_token(MaskKind kind);
std::string to_token(ExperimentMode mode);
MaskKind mask_kind_from_token(const std::string& token);
ExperimentMode mode_from_token(const std::string& token);

}  // namespace ars
