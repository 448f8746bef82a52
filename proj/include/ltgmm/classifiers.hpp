#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ltgmm/estimators.hpp"
#include "ltgmm/model.hpp"
#include "ltgmm/rng.hpp"

namespace ltgmm {

// Centroid rule: label by the nearer of two class centers.  The Gaussian
// variance cancels out of the likelihood comparison for equal covariances,
// so only the centers are stored.
struct LdaClassifier {
  std::vector<double> mu_plus;
  std::vector<double> mu_minus;
};

// Structured density rule for the long-tailed mixture with known sigma and
// p: positive iff the positive density beats both negative components.
struct MdaClassifier {
  std::vector<double> mu;
  double sigma = 1.0;
  double p = 0.9;
};

// Density rule over two fitted mixtures.
struct GenericMdaClassifier {
  GmmModel f_plus;
  GmmModel f_minus;
  double prior_plus = 0.5;
};

// Margin of the centroid rule before taking the sign:
// ||x - mu_minus||^2 - ||x - mu_plus||^2 (positive means +1).
double lda_decision_statistic(const LdaClassifier& model,
                              std::span<const double> x);

// +1 iff ||x - mu_plus|| <= ||x - mu_minus||; ties go to +1.
int lda_classify(const LdaClassifier& model, std::span<const double> x);

// +1 iff the positive-component density dominates both negative components,
// evaluated in log space:
//   x . mu >= sigma^2 ln(p) / 2   and   (x - 2 mu) . mu <= -sigma^2 ln(1-p) / 2;
// ties go to +1.
int mda_classify(const MdaClassifier& model, std::span<const double> x);

// +1 iff ln(prior_plus) + gmm_logpdf(f_plus, x) >= ln(1 - prior_plus) +
// gmm_logpdf(f_minus, x); with the default equal priors this is a direct
// density comparison.  Ties go to +1.
int generic_mda_classify(const GenericMdaClassifier& model,
                         std::span<const double> x);

// Classifiers built from the true parameters.
LdaClassifier make_oracle_lda(const ModelParams& params);
MdaClassifier make_oracle_mda(const ModelParams& params);

// Plug-in classifiers: mu is replaced by the method-of-moments estimate.
// sigma and p are the assumed (not estimated) noise scale and majority
// weight; both rules use p to place the negative structure.
LdaClassifier fit_lda(const Dataset& data, double sigma, double p);
MdaClassifier fit_mda(const Dataset& data, double sigma, double p);

// Class-conditional mixture fits: k_plus components on the positive class,
// k_minus on the negative class.  Each class must have at least as many
// points as its component count.
GenericMdaClassifier fit_generic_mda(const Dataset& data, int k_plus,
                                     int k_minus, const EmConfig& config,
                                     RngStream& stream);

// Misclassification rate with the per-subpopulation breakdown (tags 0, 1, 2).
struct ErrorBreakdown {
  double error = 0.0;
  std::array<std::size_t, 3> count{};
  std::array<std::size_t, 3> mistakes{};
  double subpopulation_rate(int tag) const;
};

using DecisionFn = std::function<int(std::span<const double>)>;

ErrorBreakdown empirical_error(const DecisionFn& classify,
                               const Dataset& testset);

// Which learning algorithm memorization_score retrains.
struct LearnerSpec {
  enum class Kind { fitted_lda, fitted_mda, generic_mda };
  Kind kind = Kind::fitted_mda;
  double sigma = 1.0;   // fitted_lda / fitted_mda
  double p = 0.9;       // fitted_lda / fitted_mda
  int k_plus = 1;       // generic_mda
  int k_minus = 2;      // generic_mda
  EmConfig em;          // generic_mda
};

// Label-memorization score of training point `index`:
//   Pr[h(x_i) = y_i, h trained on S] - Pr[h(x_i) = y_i, h trained on S\i].
// The second training set is the honest leave-one-out retrain.  For the
// deterministic moment-fitted learners the probabilities are 0/1 indicators
// and `restarts`/`stream` are ignored; for generic_mda each probability is
// the fraction over `restarts` independently seeded EM fits.
double memorization_score(const LearnerSpec& learner, const Dataset& data,
                          std::size_t index, int restarts, RngStream& stream);

}  // namespace ltgmm
