#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ltgmm/rng.hpp"

namespace ltgmm {

// Binary-label Gaussian mixture with a long-tailed negative class.
//
//   Y = +1 w.p. 1/2:  X ~ N(mu, sigma^2 I)
//   Y = -1 w.p. 1/2:  X ~ p N(-mu, sigma^2 I) + (1-p) N(3 mu, sigma^2 I)
//
// The N(-mu, .) component is the negative majority and N(3 mu, .) is the
// negative minority sitting far beyond the positive class.  Subpopulations
// carry a tag k: 0 for the positive class, 1 for the negative majority,
// 2 for the negative minority.
struct ModelParams {
  int d = 0;
  std::vector<double> mu;
  double sigma = 1.0;
  double p = 0.9;

  double mu_norm() const;
  // Signal-to-noise ratio nu = ||mu|| / sigma.
  double nu() const;
  // Mean of the full negative class: p(-mu) + (1-p)(3 mu) = -(4p-3) mu.
  std::vector<double> mu_minus() const;
  // Component centers by tag.
  std::vector<double> center(int k) const;
};

enum class DirectionMode { fixed, random };

// Build parameters with ||mu|| = mu_norm.  In fixed mode the direction is
// (1,...,1)/sqrt(d); in random mode it is drawn uniformly on the sphere from
// direction_stream (required in that mode).  Requires d >= 1, mu_norm > 0,
// sigma > 0, and 1/2 < p < 1.
ModelParams make_params(int d, double mu_norm, double sigma, double p,
                        DirectionMode mode,
                        RngStream* direction_stream = nullptr);

struct Dataset {
  int d = 0;
  std::vector<double> x;  // n x d, row-major
  std::vector<int> y;     // +1 / -1
  std::vector<int> k;     // subpopulation tag: 0, 1, 2

  // Which stream produced the sample, when known.
  struct Provenance {
    std::uint64_t master_seed = 0;
    std::uint64_t substream_index = 0;
  };
  std::optional<Provenance> provenance;

  std::size_t n() const { return y.size(); }
  std::span<const double> point(std::size_t i) const {
    return {x.data() + i * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d)};
  }
};

// Draw n labeled points.  Labels and subpopulation tags are assigned in a
// first pass (one uniform for the label, one more for negative points to
// pick majority vs minority), then features are filled in a second pass, so
// the label sequence for a given stream does not depend on d.
Dataset sample_dataset(const ModelParams& params, std::size_t n,
                       RngStream& stream);

struct SubpopulationStats {
  std::array<std::size_t, 3> count{};        // indexed by tag k
  std::array<std::vector<double>, 3> mean{};  // empty when count[k] == 0
};

SubpopulationStats subpopulation_stats(const Dataset& data);

// CSV with header x0,...,x{d-1},y,k; doubles as shortest round-trip decimals.
void write_dataset_csv(const Dataset& data, std::ostream& out);
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

}  // namespace ltgmm
