#include "ltgmm/classifiers.hpp"

#include <cmath>
#include <stdexcept>

#include "ltgmm/vecops.hpp"

namespace ltgmm {

namespace {

void check_dim(std::size_t got, std::size_t want, const char* who) {
  if (got != want)
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

void check_sigma_p(double sigma, double p, const char* who) {
  if (!(sigma > 0.0))
    throw std::invalid_argument(std::string(who) + ": sigma must be positive");
  if (!(p > 0.5) || !(p < 1.0))
    throw std::invalid_argument(std::string(who) + ": p must lie in (1/2, 1)");
}

// Rows of one class as a flat buffer for EM.
std::vector<double> class_points(const Dataset& data, int label) {
  std::vector<double> out;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.y[i] != label) continue;
    const auto xi = data.point(i);
    out.insert(out.end(), xi.begin(), xi.end());
  }
  return out;
}

Dataset without_point(const Dataset& data, std::size_t index) {
  Dataset out;
  out.d = data.d;
  const std::size_t d = static_cast<std::size_t>(data.d);
  out.x.reserve(data.x.size() - d);
  out.y.reserve(data.n() - 1);
  out.k.reserve(data.n() - 1);
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (i == index) continue;
    const auto xi = data.point(i);
    out.x.insert(out.x.end(), xi.begin(), xi.end());
    out.y.push_back(data.y[i]);
    out.k.push_back(data.k[i]);
  }
  return out;
}

}  // namespace

double lda_decision_statistic(const LdaClassifier& model,
                              std::span<const double> x) {
  check_dim(x.size(), model.mu_plus.size(), "lda_classify");
  check_dim(model.mu_minus.size(), model.mu_plus.size(), "lda_classify");
  return vec::sqdist(x, model.mu_minus) - vec::sqdist(x, model.mu_plus);
}

int lda_classify(const LdaClassifier& model, std::span<const double> x) {
  return lda_decision_statistic(model, x) >= 0.0 ? +1 : -1;
}

int mda_classify(const MdaClassifier& model, std::span<const double> x) {
  check_dim(x.size(), model.mu.size(), "mda_classify");
  check_sigma_p(model.sigma, model.p, "mda_classify");
  const double proj = vec::dot(x, model.mu);
  const double mu_sq = vec::sqnorm(model.mu);
  const double s2 = model.sigma * model.sigma;
  // Positive density beats the negative majority at -mu ...
  const bool beats_majority = proj >= 0.5 * s2 * std::log(model.p);
  // ... and the negative minority at 3 mu.
  const bool beats_minority =
      proj - 2.0 * mu_sq <= -0.5 * s2 * std::log(1.0 - model.p);
  return (beats_majority && beats_minority) ? +1 : -1;
}

int generic_mda_classify(const GenericMdaClassifier& model,
                         std::span<const double> x) {
  if (model.f_plus.d != model.f_minus.d)
    throw std::invalid_argument("generic_mda_classify: model dimension clash");
  if (!(model.prior_plus > 0.0) || !(model.prior_plus < 1.0))
    throw std::invalid_argument(
        "generic_mda_classify: prior_plus must lie in (0, 1)");
  const double lhs = std::log(model.prior_plus) + gmm_logpdf(model.f_plus, x);
  const double rhs =
      std::log(1.0 - model.prior_plus) + gmm_logpdf(model.f_minus, x);
  return lhs >= rhs ? +1 : -1;
}

LdaClassifier make_oracle_lda(const ModelParams& params) {
  return LdaClassifier{params.mu, params.mu_minus()};
}

MdaClassifier make_oracle_mda(const ModelParams& params) {
  return MdaClassifier{params.mu, params.sigma, params.p};
}

LdaClassifier fit_lda(const Dataset& data, double sigma, double p) {
  check_sigma_p(sigma, p, "fit_lda");
  const std::vector<double> mu_hat = mom_estimate_mu(data, p);
  LdaClassifier model;
  model.mu_plus = mu_hat;
  model.mu_minus.resize(mu_hat.size());
  const double scale = -(4.0 * p - 3.0);
  for (std::size_t j = 0; j < mu_hat.size(); ++j)
    model.mu_minus[j] = scale * mu_hat[j];
  return model;
}

MdaClassifier fit_mda(const Dataset& data, double sigma, double p) {
  check_sigma_p(sigma, p, "fit_mda");
  return MdaClassifier{mom_estimate_mu(data, p), sigma, p};
}

GenericMdaClassifier fit_generic_mda(const Dataset& data, int k_plus,
                                     int k_minus, const EmConfig& config,
                                     RngStream& stream) {
  if (k_plus < 1 || k_minus < 1)
    throw std::invalid_argument("fit_generic_mda: component counts must be >= 1");
  const std::vector<double> pos = class_points(data, +1);
  const std::vector<double> neg = class_points(data, -1);
  const std::size_t d = static_cast<std::size_t>(data.d);
  if (pos.size() / d < static_cast<std::size_t>(k_plus))
    throw std::invalid_argument(
        "fit_generic_mda: positive class smaller than k_plus");
  if (neg.size() / d < static_cast<std::size_t>(k_minus))
    throw std::invalid_argument(
        "fit_generic_mda: negative class smaller than k_minus");
  RngStream pos_stream = stream.split(0);
  RngStream neg_stream = stream.split(1);
  GenericMdaClassifier model;
  model.f_plus = em_fit_gmm(pos, data.d, k_plus, config, pos_stream).model;
  model.f_minus = em_fit_gmm(neg, data.d, k_minus, config, neg_stream).model;
  model.prior_plus = 0.5;
  return model;
}

double ErrorBreakdown::subpopulation_rate(int tag) const {
  if (tag < 0 || tag > 2)
    throw std::invalid_argument("subpopulation_rate: tag must be 0, 1, or 2");
  const auto t = static_cast<std::size_t>(tag);
  if (count[t] == 0) return 0.0;
  return static_cast<double>(mistakes[t]) / static_cast<double>(count[t]);
}

ErrorBreakdown empirical_error(const DecisionFn& classify,
                               const Dataset& testset) {
  if (testset.n() == 0)
    throw std::invalid_argument("empirical_error: testset must be nonempty");
  ErrorBreakdown result;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < testset.n(); ++i) {
    const auto tag = static_cast<std::size_t>(testset.k[i]);
    if (tag > 2) throw std::invalid_argument("empirical_error: bad tag");
    ++result.count[tag];
    const int decision = classify(testset.point(i));
    if (decision != testset.y[i]) {
      ++wrong;
      ++result.mistakes[tag];
    }
  }
  result.error = static_cast<double>(wrong) / static_cast<double>(testset.n());
  return result;
}

double memorization_score(const LearnerSpec& learner, const Dataset& data,
                          std::size_t index, int restarts, RngStream& stream) {
  if (index >= data.n())
    throw std::invalid_argument("memorization_score: index out of range");
  if (restarts < 1)
    throw std::invalid_argument("memorization_score: restarts must be >= 1");
  const std::span<const double> xi = data.point(index);
  const int yi = data.y[index];

  switch (learner.kind) {
    case LearnerSpec::Kind::fitted_lda: {
      const LdaClassifier with = fit_lda(data, learner.sigma, learner.p);
      // Leave-one-out without materializing the reduced dataset: the moment
      // estimate is a rescaled sum, so drop one term.
      LdaClassifier without;
      without.mu_plus = mom_estimate_mu_excluding(data, learner.p, index);
      without.mu_minus.resize(without.mu_plus.size());
      const double scale = -(4.0 * learner.p - 3.0);
      for (std::size_t j = 0; j < without.mu_plus.size(); ++j)
        without.mu_minus[j] = scale * without.mu_plus[j];
      const int a = lda_classify(with, xi) == yi ? 1 : 0;
      const int b = lda_classify(without, xi) == yi ? 1 : 0;
      return static_cast<double>(a - b);
    }
    case LearnerSpec::Kind::fitted_mda: {
      const MdaClassifier with = fit_mda(data, learner.sigma, learner.p);
      const MdaClassifier without{
          mom_estimate_mu_excluding(data, learner.p, index), learner.sigma,
          learner.p};
      const int a = mda_classify(with, xi) == yi ? 1 : 0;
      const int b = mda_classify(without, xi) == yi ? 1 : 0;
      return static_cast<double>(a - b);
    }
    case LearnerSpec::Kind::generic_mda: {
      const Dataset reduced = without_point(data, index);
      int with_correct = 0;
      int without_correct = 0;
      for (int r = 0; r < restarts; ++r) {
        RngStream with_stream = stream.split(2 * r);
        RngStream without_stream = stream.split(2 * r + 1);
        const GenericMdaClassifier hw = fit_generic_mda(
            data, learner.k_plus, learner.k_minus, learner.em, with_stream);
        const GenericMdaClassifier ho =
            fit_generic_mda(reduced, learner.k_plus, learner.k_minus,
                            learner.em, without_stream);
        if (generic_mda_classify(hw, xi) == yi) ++with_correct;
        if (generic_mda_classify(ho, xi) == yi) ++without_correct;
      }
      return (with_correct - without_correct) / static_cast<double>(restarts);
    }
  }
  throw std::invalid_argument("memorization_score: unknown learner kind");
}

}  // namespace ltgmm
