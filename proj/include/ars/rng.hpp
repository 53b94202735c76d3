#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ars {

// Counter-based splittable generator. Output i of a stream is a pure
// function of (seed, stream_id, i), so any consumer that owns a stream
// reproduces the same sequence regardless of thread count or interleaving.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Derives an independent child stream; the child starts at position 0.
  // Derivation composes, so r.stream(a).stream(b) is well defined.
  SeededRng stream(std::uint64_t substream) const noexcept;

  std::uint64_t next_u64() noexcept;

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double next_uniform() noexcept;

  // Standard normal via inverse-CDF transform of one uniform draw.
  double next_normal() noexcept;

  void fill_normal(std::span<double> out) noexcept;

 private:
  SeededRng(std::uint64_t seed, std::uint64_t stream_id,
            std::uint64_t key) noexcept
      : seed_(seed), stream_id_(stream_id), key_(key) {}

  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// Draws n standard normal deviates from rng's current position.
std::vector<double> sample_standard_normal(SeededRng& rng, std::size_t n);

}  // namespace ars
