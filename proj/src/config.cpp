#include "ars/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace ars {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "not a number: '" + value + "'");
  }
  if (used != value.size()) {
    throw ConfigError(key, "trailing characters in '" + value + "'");
  }
  return out;
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "not a count: '" + value + "'");
  }
  if (used != value.size() || value[0] == '-') {
    throw ConfigError(key, "not a count: '" + value + "'");
  }
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::istringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

std::string to_token(MaskKind kind) {
  switch (kind) {
    case MaskKind::kAllOnes: return "allones";
    case MaskKind::kOracleIndicator: return "oracle";
    case MaskKind::kEnergyWindow: return "energywindow";
    case MaskKind::kStaticLearnedStub: return "staticstub";
  }
  return "energywindow";
}

std::string to_token(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kArs: return "ars";
    case ExperimentMode::kPlainRs: return "plainrs";
    case ExperimentMode::kStaticStub: return "staticstub";
  }
  return "ars";
}

MaskKind mask_kind_from_token(const std::string& token) {
  if (token == "allones") return MaskKind::kAllOnes;
  if (token == "oracle") return MaskKind::kOracleIndicator;
  if (token == "energywindow") return MaskKind::kEnergyWindow;
  if (token == "staticstub") return MaskKind::kStaticLearnedStub;
  throw ConfigError("mask", "unknown mask kind '" + token +
                                "' (allones|oracle|energywindow|staticstub)");
}

ExperimentMode mode_from_token(const std::string& token) {
  if (token == "ars") return ExperimentMode::kArs;
  if (token == "plainrs") return ExperimentMode::kPlainRs;
  if (token == "staticstub") return ExperimentMode::kStaticStub;
  throw ConfigError("mode", "unknown mode '" + token +
                                "' (ars|plainrs|staticstub)");
}

void ExperimentConfig::resolve() {
  if (sigma1 == 0.0 && sigma > 0.0) sigma1 = std::sqrt(2.0) * sigma;
  if (window_k == 0) window_k = k;
  if (radius_grid.empty()) {
    for (int i = 0; i <= 50; ++i) radius_grid.push_back(0.002 * i);
  }
}

void ExperimentConfig::validate() const {
  if (!(sigma > 0.0)) throw ConfigError("sigma", "must be positive");
  if (sigma1 != 0.0 && !(sigma1 > sigma)) {
    throw ConfigError("sigma1", "must exceed sigma (the step-1 scale spends "
                                "only part of the budget)");
  }
  if (d == 0) throw ConfigError("d", "must be at least 1");
  if (k == 0 || k > d) throw ConfigError("k", "need 1 <= k <= d");
  if (n0 == 0) throw ConfigError("n0", "must be at least 1");
  if (n == 0) throw ConfigError("n", "must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha", "must lie in (0, 1)");
  }
  if (seeds.empty()) throw ConfigError("seeds", "need at least one seed");
  if (sample_count == 0) throw ConfigError("samples", "must be at least 1");
  if (!(signal_margin > 0.0)) throw ConfigError("margin", "must be positive");
  if (window_k > d) throw ConfigError("window", "exceeds d");
  if (jobs == 0) throw ConfigError("jobs", "must be at least 1");
  if (!std::is_sorted(radius_grid.begin(), radius_grid.end())) {
    throw ConfigError("grid", "must be sorted ascending");
  }
  for (double r : radius_grid) {
    if (!(r >= 0.0)) throw ConfigError("grid", "radii must be nonnegative");
  }
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "sigma = " << format_double(sigma) << '\n';
  out << "sigma1 = " << format_double(sigma1) << '\n';
  out << "d = " << d << '\n';
  out << "k = " << k << '\n';
  out << "n0 = " << n0 << '\n';
  out << "n = " << n << '\n';
  out << "alpha = " << format_double(alpha) << '\n';
  out << "mask = " << to_token(mask_kind) << '\n';
  out << "mode = " << to_token(mode) << '\n';
  out << "seeds = ";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out << ',';
    out << seeds[i];
  }
  out << '\n';
  out << "grid = ";
  for (std::size_t i = 0; i < radius_grid.size(); ++i) {
    if (i) out << ',';
    out << format_double(radius_grid[i]);
  }
  out << '\n';
  out << "samples = " << sample_count << '\n';
  out << "margin = " << format_double(signal_margin) << '\n';
  out << "window = " << window_k << '\n';
  // jobs is deliberately absent: it is an execution knob, and serialized
  // configs land in output headers that must not depend on it.
  return out.str();
}

void ExperimentConfig::set_field(const std::string& key,
                                 const std::string& value) {
  if (key == "sigma") {
    sigma = parse_double(key, value);
  } else if (key == "sigma1") {
    sigma1 = parse_double(key, value);
  } else if (key == "d") {
    d = parse_count(key, value);
  } else if (key == "k") {
    k = parse_count(key, value);
  } else if (key == "n0") {
    n0 = parse_count(key, value);
  } else if (key == "n") {
    n = parse_count(key, value);
  } else if (key == "alpha") {
    alpha = parse_double(key, value);
  } else if (key == "mask") {
    mask_kind = mask_kind_from_token(value);
  } else if (key == "mode") {
    mode = mode_from_token(value);
  } else if (key == "seeds") {
    seeds.clear();
    for (const std::string& item : split_list(value)) {
      seeds.push_back(parse_count(key, item));
    }
  } else if (key == "grid") {
    radius_grid.clear();
    for (const std::string& item : split_list(value)) {
      radius_grid.push_back(parse_double(key, item));
    }
  } else if (key == "samples") {
    sample_count = parse_count(key, value);
  } else if (key == "margin") {
    signal_margin = parse_double(key, value);
  } else if (key == "window") {
    window_k = parse_count(key, value);
  } else if (key == "jobs") {
    jobs = parse_count(key, value);
  } else {
    throw ConfigError(key, "unknown configuration key");
  }
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no += 1;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no),
                        "expected 'key = value', got '" + line + "'");
    }
    config.set_field(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  return parse(in);
}

}  // namespace ars
