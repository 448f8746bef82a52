#include "ltgmm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "ltgmm/csvutil.hpp"
#include "ltgmm/errors.hpp"
#include "ltgmm/vecops.hpp"

namespace ltgmm {

namespace {

void check_mom_args(const Dataset& data, double p) {
  if (data.n() == 0)
    throw std::invalid_argument("mom_estimate_mu: dataset must be nonempty");
  if (!(p > 0.5) || !(p < 1.0))
    throw std::invalid_argument("mom_estimate_mu: p must lie in (1/2, 1)");
}

std::vector<double> scaled_sum(const Dataset& data, double p,
                               std::ptrdiff_t excluded) {
  const std::size_t d = static_cast<std::size_t>(data.d);
  const std::size_t n_used =
      data.n() - (excluded >= 0 ? std::size_t{1} : std::size_t{0});
  if (n_used == 0)
    throw std::invalid_argument("mom_estimate_mu: no points left");
  std::vector<double> acc(d, 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == excluded) continue;
    const double* row = data.x.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) acc[j] += row[j];
  }
  const double scale = 1.0 / (2.0 * static_cast<double>(n_used) * (1.0 - p));
  for (double& v : acc) v *= scale;
  return acc;
}

constexpr double kLog2Pi = 1.8378770664093454836;

struct EmScratch {
  std::vector<double> log_weight;   // per component
  std::vector<double> log_norm;     // per component: -(d/2) ln(2 pi v)
  std::vector<double> resp_sum;     // N_j
  std::vector<double> mean_acc;     // k x d
  std::vector<double> sq_acc;       // sum_i r_ij ||x_i||^2
  std::vector<double> logp;         // per component, reused per point
};

// One E-step pass over the data: returns the log-likelihood of `model` and
// fills the M-step sufficient statistics.
double estep(std::span<const double> points, std::size_t n, std::size_t d,
             const GmmModel& model, EmScratch& s) {
  const std::size_t k = model.components.size();
  s.log_weight.assign(k, 0.0);
  s.log_norm.assign(k, 0.0);
  s.resp_sum.assign(k, 0.0);
  s.mean_acc.assign(k * d, 0.0);
  s.sq_acc.assign(k, 0.0);
  s.logp.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const GmmComponent& comp = model.components[j];
    s.log_weight[j] = comp.weight > 0.0
                          ? std::log(comp.weight)
                          : -std::numeric_limits<double>::infinity();
    s.log_norm[j] = -0.5 * static_cast<double>(d) *
                    (kLog2Pi + std::log(comp.variance));
  }

  double loglik = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> xi = points.subspan(i * d, d);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      const GmmComponent& comp = model.components[j];
      const double sq = vec::sqdist(xi, comp.mean);
      s.logp[j] = s.log_weight[j] + s.log_norm[j] - 0.5 * sq / comp.variance;
      best = std::max(best, s.logp[j]);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) total += std::exp(s.logp[j] - best);
    const double lse = best + std::log(total);
    loglik += lse;
    const double xsq = vec::sqnorm(xi);
    for (std::size_t j = 0; j < k; ++j) {
      const double r = std::exp(s.logp[j] - lse);
      if (r == 0.0) continue;
      s.resp_sum[j] += r;
      s.sq_acc[j] += r * xsq;
      double* acc = s.mean_acc.data() + j * d;
      for (std::size_t t = 0; t < d; ++t) acc[t] += r * xi[t];
    }
  }
  return loglik;
}

// M-step from the accumulated statistics; components that received no mass
// keep their previous mean and variance.
void mstep(std::size_t n, std::size_t d, double floor_abs, const EmScratch& s,
           GmmModel& model) {
  const std::size_t k = model.components.size();
  for (std::size_t j = 0; j < k; ++j) {
    GmmComponent& comp = model.components[j];
    const double nj = s.resp_sum[j];
    comp.weight = nj / static_cast<double>(n);
    if (nj <= 0.0) continue;
    const double* acc = s.mean_acc.data() + j * d;
    for (std::size_t t = 0; t < d; ++t) comp.mean[t] = acc[t] / nj;
    const double var =
        (s.sq_acc[j] / nj - vec::sqnorm(comp.mean)) / static_cast<double>(d);
    comp.variance = std::max(var, floor_abs);
  }
}

// k-means++-style seeding: first center uniform, later centers picked with
// probability proportional to squared distance from the nearest chosen one.
std::vector<std::size_t> kmeans_pp_seeds(std::span<const double> points,
                                         std::size_t n, std::size_t d,
                                         std::size_t k, RngStream& stream) {
  std::vector<std::size_t> seeds;
  seeds.reserve(k);
  seeds.push_back(static_cast<std::size_t>(stream.next_below(n)));
  std::vector<double> dist2(n);
  for (std::size_t i = 0; i < n; ++i)
    dist2[i] = vec::sqdist(points.subspan(i * d, d),
                           points.subspan(seeds[0] * d, d));
  while (seeds.size() < k) {
    const double total = std::accumulate(dist2.begin(), dist2.end(), 0.0);
    std::size_t pick;
    if (total > 0.0) {
      const double target = stream.next_unit() * total;
      double run = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        run += dist2[i];
        if (run >= target) {
          pick = i;
          break;
        }
      }
    } else {
      // All remaining points coincide with chosen centers (duplicate data);
      // fall back to a uniform pick.
      pick = static_cast<std::size_t>(stream.next_below(n));
    }
    seeds.push_back(pick);
    for (std::size_t i = 0; i < n; ++i)
      dist2[i] = std::min(dist2[i], vec::sqdist(points.subspan(i * d, d),
                                                points.subspan(pick * d, d)));
  }
  return seeds;
}

GmmModel init_model(std::span<const double> points, std::size_t n,
                    std::size_t d, std::size_t k, const EmConfig& config,
                    double data_variance, double floor_abs,
                    RngStream& stream) {
  GmmModel model;
  model.d = static_cast<int>(d);
  model.components.resize(k);
  for (auto& comp : model.components) comp.mean.assign(d, 0.0);

  if (config.init == EmConfig::Init::random_points) {
    // k distinct data points as means, uniform weights, pooled variance.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t swap_with =
          j + static_cast<std::size_t>(stream.next_below(n - j));
      std::swap(order[j], order[swap_with]);
      const std::span<const double> xi = points.subspan(order[j] * d, d);
      std::copy(xi.begin(), xi.end(), model.components[j].mean.begin());
      model.components[j].weight = 1.0 / static_cast<double>(k);
      model.components[j].variance = std::max(data_variance, floor_abs);
    }
    return model;
  }

  const std::vector<std::size_t> seeds =
      kmeans_pp_seeds(points, n, d, k, stream);
  // One Lloyd pass over the seeds.
  std::vector<std::size_t> count(k, 0);
  std::vector<double> mean_acc(k * d, 0.0);
  std::vector<double> sq_acc(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> xi = points.subspan(i * d, d);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      const double dj = vec::sqdist(xi, points.subspan(seeds[j] * d, d));
      if (dj < best_d) {
        best_d = dj;
        best = j;
      }
    }
    ++count[best];
    sq_acc[best] += vec::sqnorm(xi);
    double* acc = mean_acc.data() + best * d;
    for (std::size_t t = 0; t < d; ++t) acc[t] += xi[t];
  }
  for (std::size_t j = 0; j < k; ++j) {
    GmmComponent& comp = model.components[j];
    if (count[j] > 0) {
      const double nj = static_cast<double>(count[j]);
      const double* acc = mean_acc.data() + j * d;
      for (std::size_t t = 0; t < d; ++t) comp.mean[t] = acc[t] / nj;
      const double var =
          (sq_acc[j] / nj - vec::sqnorm(comp.mean)) / static_cast<double>(d);
      comp.variance = std::max(var, floor_abs);
    } else {
      // Empty cluster: keep the seed point itself.
      const std::span<const double> xi = points.subspan(seeds[j] * d, d);
      std::copy(xi.begin(), xi.end(), comp.mean.begin());
      comp.variance = std::max(data_variance, floor_abs);
    }
    // Smoothed weights keep zero-count components revivable.
    comp.weight = (static_cast<double>(count[j]) + 1e-6) /
                  (static_cast<double>(n) + 1e-6 * static_cast<double>(k));
  }
  return model;
}

void check_gmm(const GmmModel& model) {
  if (model.components.empty())
    throw std::invalid_argument("GmmModel: needs at least one component");
  double wsum = 0.0;
  for (const auto& comp : model.components) {
    if (comp.mean.size() != static_cast<std::size_t>(model.d))
      throw std::invalid_argument("GmmModel: component dimension mismatch");
    if (!(comp.variance > 0.0))
      throw std::invalid_argument("GmmModel: variance must be positive");
    if (comp.weight < 0.0 || comp.weight > 1.0)
      throw std::invalid_argument("GmmModel: weight must lie in [0,1]");
    wsum += comp.weight;
  }
  if (std::fabs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("GmmModel: weights must sum to 1");
}

}  // namespace

std::vector<double> mom_estimate_mu(const Dataset& data, double p) {
  check_mom_args(data, p);
  return scaled_sum(data, p, -1);
}

std::vector<double> mom_estimate_mu_excluding(const Dataset& data, double p,
                                              std::size_t excluded_index) {
  check_mom_args(data, p);
  if (excluded_index >= data.n())
    throw std::invalid_argument("mom_estimate_mu_excluding: index out of range");
  return scaled_sum(data, p, static_cast<std::ptrdiff_t>(excluded_index));
}

EmFit em_fit_gmm(std::span<const double> points, int d, int k,
                 const EmConfig& config, RngStream& stream,
                 std::vector<double>* iteration_loglik) {
  if (d < 1) throw std::invalid_argument("em_fit_gmm: d must be >= 1");
  if (k < 1) throw std::invalid_argument("em_fit_gmm: k must be >= 1");
  if (points.size() % static_cast<std::size_t>(d) != 0)
    throw std::invalid_argument("em_fit_gmm: point buffer not divisible by d");
  const std::size_t n = points.size() / static_cast<std::size_t>(d);
  if (n < static_cast<std::size_t>(k))
    throw std::invalid_argument("em_fit_gmm: fewer points than components");
  for (double v : points)
    if (!std::isfinite(v))
      throw std::invalid_argument("em_fit_gmm: non-finite point coordinate");
  if (config.max_iter < 1)
    throw std::invalid_argument("em_fit_gmm: max_iter must be >= 1");
  if (config.restarts < 1)
    throw std::invalid_argument("em_fit_gmm: restarts must be >= 1");
  if (!(config.tol > 0.0))
    throw std::invalid_argument("em_fit_gmm: tol must be positive");
  if (!(config.variance_floor > 0.0))
    throw std::invalid_argument("em_fit_gmm: variance_floor must be positive");

  const std::size_t dd = static_cast<std::size_t>(d);
  // Pooled data variance sets the scale of the variance floor.
  std::vector<double> grand_mean(dd, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = points.data() + i * dd;
    for (std::size_t t = 0; t < dd; ++t) grand_mean[t] += row[t];
  }
  for (double& v : grand_mean) v /= static_cast<double>(n);
  double data_variance = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    data_variance += vec::sqdist(points.subspan(i * dd, dd), grand_mean);
  data_variance /= static_cast<double>(n) * static_cast<double>(dd);
  const double floor_abs = data_variance > 0.0
                               ? config.variance_floor * data_variance
                               : config.variance_floor;

  EmFit best;
  double best_ll = -std::numeric_limits<double>::infinity();
  std::vector<double> best_trace;
  EmScratch scratch;

  for (int r = 0; r < config.restarts; ++r) {
    RngStream rs = stream.split(r);
    GmmModel model = init_model(points, n, dd, static_cast<std::size_t>(k),
                                config, data_variance, floor_abs, rs);
    std::vector<double> trace;
    double prev_ll = -std::numeric_limits<double>::infinity();
    double ll = prev_ll;
    for (int it = 0;; ++it) {
      ll = estep(points, n, dd, model, scratch);
      if (!std::isfinite(ll))
        throw NumericalError("em_fit_gmm: log-likelihood became non-finite");
      trace.push_back(ll);
      if (it > 0 && ll - prev_ll < config.tol * std::fabs(ll)) break;
      if (it >= config.max_iter) break;
      mstep(n, dd, floor_abs, scratch, model);
      prev_ll = ll;
    }
    if (ll > best_ll) {
      best_ll = ll;
      best.model = std::move(model);
      best.loglik = ll;
      best_trace = std::move(trace);
    }
  }
  if (iteration_loglik != nullptr) *iteration_loglik = std::move(best_trace);
  return best;
}

double gmm_logpdf(const GmmModel& model, std::span<const double> x) {
  check_gmm(model);
  if (x.size() != static_cast<std::size_t>(model.d))
    throw std::invalid_argument("gmm_logpdf: dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> logp(model.components.size());
  for (std::size_t j = 0; j < model.components.size(); ++j) {
    const GmmComponent& comp = model.components[j];
    if (comp.weight <= 0.0) {
      logp[j] = -std::numeric_limits<double>::infinity();
      continue;
    }
    logp[j] = std::log(comp.weight) -
              0.5 * static_cast<double>(model.d) *
                  (kLog2Pi + std::log(comp.variance)) -
              0.5 * vec::sqdist(x, comp.mean) / comp.variance;
    best = std::max(best, logp[j]);
  }
  if (!std::isfinite(best)) return best;
  double total = 0.0;
  for (double lp : logp) total += std::exp(lp - best);
  return best + std::log(total);
}

std::vector<double> gmm_responsibilities(const GmmModel& model,
                                         std::span<const double> x) {
  check_gmm(model);
  if (x.size() != static_cast<std::size_t>(model.d))
    throw std::invalid_argument("gmm_responsibilities: dimension mismatch");
  const std::size_t k = model.components.size();
  std::vector<double> logp(k);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    const GmmComponent& comp = model.components[j];
    logp[j] = comp.weight > 0.0
                  ? std::log(comp.weight) -
                        0.5 * static_cast<double>(model.d) *
                            (kLog2Pi + std::log(comp.variance)) -
                        0.5 * vec::sqdist(x, comp.mean) / comp.variance
                  : -std::numeric_limits<double>::infinity();
    best = std::max(best, logp[j]);
  }
  std::vector<double> resp(k, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) total += std::exp(logp[j] - best);
  for (std::size_t j = 0; j < k; ++j)
    resp[j] = std::exp(logp[j] - best) / total;
  return resp;
}

void write_gmm(const GmmModel& model, std::ostream& out) {
  check_gmm(model);
  out << model.components.size() << ',' << model.d << '\n';
  for (const auto& comp : model.components) {
    out << csv::format_double(comp.weight);
    for (double m : comp.mean) out << ',' << csv::format_double(m);
    out << ',' << csv::format_double(comp.variance) << '\n';
  }
}

void write_gmm(const GmmModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_gmm(model, out);
  if (!out) throw IoError("write failed: " + path);
}

GmmModel read_gmm(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("gmm: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = csv::split_fields(line);
  if (header.size() != 2) throw IoError("gmm: header must be k,d");
  const long long k = csv::parse_int(header[0]);
  const long long d = csv::parse_int(header[1]);
  if (k < 1 || d < 1) throw IoError("gmm: header k and d must be >= 1");

  GmmModel model;
  model.d = static_cast<int>(d);
  for (long long j = 0; j < k; ++j) {
    if (!std::getline(in, line)) throw IoError("gmm: missing component row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = csv::split_fields(line);
    if (fields.size() != static_cast<std::size_t>(d) + 2)
      throw IoError("gmm: component row has wrong field count");
    GmmComponent comp;
    comp.weight = csv::parse_double(fields[0]);
    comp.mean.reserve(static_cast<std::size_t>(d));
    for (long long t = 0; t < d; ++t)
      comp.mean.push_back(
          csv::parse_double(fields[static_cast<std::size_t>(t) + 1]));
    comp.variance = csv::parse_double(fields[static_cast<std::size_t>(d) + 1]);
    model.components.push_back(std::move(comp));
  }
  try {
    check_gmm(model);
  } catch (const std::invalid_argument& err) {
    throw IoError(std::string("gmm: ") + err.what());
  }
  return model;
}

GmmModel read_gmm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return read_gmm(in);
}

}  // namespace ltgmm
