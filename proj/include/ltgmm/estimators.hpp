#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ltgmm/model.hpp"
#include "ltgmm/rng.hpp"

namespace ltgmm {

// Method-of-moments estimate of the positive center: since the mixture mean
// is E[X] = (mu + mu_minus)/2 = 2(1-p) mu, averaging every point (labels
// ignored) and rescaling recovers mu.  Requires 1/2 < p < 1 and a nonempty
// dataset.
std::vector<double> mom_estimate_mu(const Dataset& data, double p);

// Same estimate with one point excluded, for leave-one-out retraining
// without copying the dataset.
std::vector<double> mom_estimate_mu_excluding(const Dataset& data, double p,
                                              std::size_t excluded_index);

// Spherical Gaussian mixture: each component has one scalar variance.
struct GmmComponent {
  double weight = 0.0;
  std::vector<double> mean;
  double variance = 1.0;
};

struct GmmModel {
  int d = 0;
  std::vector<GmmComponent> components;
};

struct EmConfig {
  int max_iter = 500;
  double tol = 1e-8;  // stop when loglik improvement < tol * |loglik|
  int restarts = 5;
  // Per-component variance is floored at variance_floor * (pooled data
  // variance), so the floor is scale-free.  Prevents singular collapse in
  // the many-component regime.
  double variance_floor = 1e-6;
  enum class Init { kmeans_pp, random_points };
  Init init = Init::kmeans_pp;
};

struct EmFit {
  GmmModel model;
  double loglik = 0.0;
};

// Fit a k-component spherical mixture to n = points.size()/d row-major
// points.  Runs config.restarts independent fits on substreams of `stream`
// (split by restart index) and returns the one with the highest final
// log-likelihood, ties broken toward the lowest restart index.  Each fit
// seeds with k-means++ plus one Lloyd pass (or k distinct random points),
// then iterates EM until the improvement drops below tol * |loglik| or
// max_iter iterations.  If iteration_loglik is non-null it receives the
// winning restart's per-iteration log-likelihood trace.
EmFit em_fit_gmm(std::span<const double> points, int d, int k,
                 const EmConfig& config, RngStream& stream,
                 std::vector<double>* iteration_loglik = nullptr);

// log of the mixture density at x, via log-sum-exp over components.
double gmm_logpdf(const GmmModel& model, std::span<const double> x);

// Posterior component memberships for one point; sums to 1.
std::vector<double> gmm_responsibilities(const GmmModel& model,
                                         std::span<const double> x);

// Plain-text serialization: header line `k,d`, then one line per component
// `weight,mean_0,...,mean_{d-1},variance`.
void write_gmm(const GmmModel& model, std::ostream& out);
void write_gmm(const GmmModel& model, const std::string& path);
GmmModel read_gmm(std::istream& in);
GmmModel read_gmm(const std::string& path);

}  // namespace ltgmm
