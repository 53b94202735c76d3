#include "ars/rng.hpp"

#include "ars/stats.hpp"

namespace ars {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamSalt = 0xd1342543de82ef95ULL;

// splitmix64 finalizer; full avalanche, bijective on 64 bits.
std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t derive_key(std::uint64_t parent_key, std::uint64_t stream) {
  return mix(parent_key + mix(stream * kStreamSalt + kGolden));
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed),
      stream_id_(stream_id),
      key_(derive_key(mix(seed + kGolden), stream_id)) {}

SeededRng SeededRng::stream(std::uint64_t substream) const noexcept {
  return SeededRng(seed_, substream, derive_key(key_, substream));
}

std::uint64_t SeededRng::next_u64() noexcept {
  counter_ += 1;
  return mix(key_ + counter_ * kGolden);
}

double SeededRng::next_uniform() noexcept {
  // 53 mantissa bits, offset by half an ulp so both endpoints are excluded.
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double SeededRng::next_normal() noexcept {
  return detail::fast_normal_quantile(next_uniform());
}

void SeededRng::fill_normal(std::span<double> out) noexcept {
  for (double& v : out) v = next_normal();
}

std::vector<double> sample_standard_normal(SeededRng& rng, std::size_t n) {
  std::vector<double> out(n);
  rng.fill_normal(out);
  return out;
}

}  // namespace ars
