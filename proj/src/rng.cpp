#include "ltgmm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ltgmm {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// splitmix64 output function (Steele, Lea & Flood).  Bijective on 64-bit
// words, so distinct inputs can never collide.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t substream_index)
    : master_(master_seed), sub_(substream_index) {
  // Expand the (master, substream) identity into 256 bits of state with a
  // splitmix64 chain, the seeding procedure recommended for the xoshiro
  // family.  Mixing the two identity words separately before combining keeps
  // (a, b) and (b, a) from mapping to the same state.
  std::uint64_t acc = mix64(master_seed) ^ rotl(mix64(substream_index), 32);
  for (auto& word : s_) {
    acc = mix64(acc);
    word = acc;
  }
  // xoshiro256++ requires a nonzero state; the chain above cannot produce
  // four zero words in practice, but guard anyway.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 0x9E3779B97F4A7C15ULL;
}

RngStream RngStream::split(std::int64_t index) const {
  if (index < 0) throw std::invalid_argument("rng_split: index must be >= 0");
  // mix64 is bijective and (index + 1) * odd is bijective in index, so two
  // children of the same parent always get distinct substream identities.
  std::uint64_t child =
      mix64(sub_ + (static_cast<std::uint64_t>(index) + 1) *
                       0xD1B54A32D192ED03ULL);
  return RngStream(master_, child);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be > 0");
  // Rejection sampling over the largest multiple of bound, to avoid modulo
  // bias.  (0 - bound) % bound == 2^64 mod bound.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

double RngStream::next_std_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  for (;;) {
    const double u = 2.0 * next_unit() - 1.0;
    const double v = 2.0 * next_unit() - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * scale;
    has_cached_normal_ = true;
    return u * scale;
  }
}

RngStream rng_new(std::uint64_t master_seed) { return RngStream(master_seed, 0); }

RngStream rng_split(const RngStream& parent, std::int64_t index) {
  return parent.split(index);
}

std::vector<double> sample_gaussian_vec(std::span<const double> mean,
                                        double sigma, RngStream& stream) {
  if (mean.empty())
    throw std::invalid_argument("sample_gaussian_vec: mean must be non-empty");
  if (!(sigma > 0.0))
    throw std::invalid_argument("sample_gaussian_vec: sigma must be positive");
  std::vector<double> x(mean.size());
  for (std::size_t j = 0; j < mean.size(); ++j)
    x[j] = mean[j] + sigma * stream.next_std_normal();
  return x;
}

}  // namespace ltgmm
