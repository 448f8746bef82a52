#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ltgmm {

// Counter-addressable random stream built on xoshiro256++.
//
// A stream is identified by (master_seed, substream_index).  The generator
// state is derived by hashing that pair, so any stream in the tree can be
// constructed directly without generating its siblings, and splitting a
// stream never perturbs the parent's own sequence.  This is what makes
// experiment replicates independent of scheduling order: worker threads can
// pick up grid cells in any order and still see identical draws.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t substream_index);

  // Child stream addressed by a non-negative index.  Children with distinct
  // indices are guaranteed distinct substream identities; the parent's state
  // is not advanced.
  [[nodiscard]] RngStream split(std::int64_t index) const;

  std::uint64_t next_u64();

  // Uniform double in [0, 1), 53-bit resolution.
  double next_unit();

  // Uniform integer in [0, bound).  bound must be positive.
  std::uint64_t next_below(std::uint64_t bound);

  // Standard normal deviate via the polar (Marsaglia) method.  Deviates are
  // produced in pairs; the spare is cached in the stream state.
  double next_std_normal();

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t substream_index() const { return sub_; }

 private:
  std::uint64_t s_[4];
  std::uint64_t master_;
  std::uint64_t sub_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Root stream for a run.
RngStream rng_new(std::uint64_t master_seed);

// Free-function spelling of RngStream::split.
RngStream rng_split(const RngStream& parent, std::int64_t index);

// One draw from N(mean, sigma^2 I).  sigma must be positive and mean
// non-empty.
std::vector<double> sample_gaussian_vec(std::span<const double> mean,
                                        double sigma, RngStream& stream);

}  // namespace ltgmm
