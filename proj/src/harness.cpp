#include "ltgmm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <string_view>
#include <thread>
#include <utility>

#include "ltgmm/bounds.hpp"
#include "ltgmm/classifiers.hpp"
#include "ltgmm/csvutil.hpp"
#include "ltgmm/errors.hpp"
#include "ltgmm/estimators.hpp"
#include "ltgmm/normal.hpp"
#include "ltgmm/rng.hpp"

namespace ltgmm {
namespace {

constexpr char kSweepHeader[] =
    "sweep_name,sweep_value,classifier,mean_error,ci_lo,ci_hi,bound_value,"
    "replicates,master_seed";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

long long to_int(std::string_view raw, const std::string& key) {
  const std::string_view s = trim(raw);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError("config key '" + key + "': not an integer: '" +
                      std::string(s) + "'");
  return v;
}

int to_bounded_int(std::string_view raw, const std::string& key) {
  const long long v = to_int(raw, key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError("config key '" + key + "': out of range");
  return static_cast<int>(v);
}

std::uint64_t to_uint64(std::string_view raw, const std::string& key) {
  const std::string_view s = trim(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError("config key '" + key + "': not a nonnegative integer: '" +
                      std::string(s) + "'");
  return v;
}

double to_real(std::string_view raw, const std::string& key) {
  const std::string_view s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError("config key '" + key + "': not a number: '" +
                      std::string(s) + "'");
  return v;
}

std::vector<double> to_real_list(std::string_view raw, const std::string& key) {
  std::vector<double> values;
  std::string_view rest = trim(raw);
  if (rest.empty())
    throw ConfigError("config key '" + key + "': empty list");
  while (true) {
    const std::size_t comma = rest.find(',');
    const std::string_view item =
        comma == std::string_view::npos ? rest : rest.substr(0, comma);
    values.push_back(to_real(item, key));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return values;
}

enum class LearnerKind { oracle_lda, oracle_mda, fitted_lda, fitted_mda, generic_mda };

LearnerKind learner_kind(const std::string& name) {
  if (name == "oracle_lda") return LearnerKind::oracle_lda;
  if (name == "oracle_mda") return LearnerKind::oracle_mda;
  if (name == "fitted_lda") return LearnerKind::fitted_lda;
  if (name == "fitted_mda") return LearnerKind::fitted_mda;
  if (name == "generic_mda") return LearnerKind::generic_mda;
  throw ConfigError("unknown learner '" + name +
                    "' (expected oracle_lda, oracle_mda, fitted_lda, "
                    "fitted_mda, or generic_mda)");
}

// 62-bit FNV-1a name hash, nonnegative so it is a valid substream index.
std::int64_t hash62(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::int64_t>(h & 0x3fffffffffffffffULL);
}

// Substream for one (experiment, grid cell, replicate) triple.  Derived
// quantities use fixed child indices: 0 train sample, 1 test sample, 2 EM,
// 3 random direction, 4 memorization scoring.
RngStream cell_stream(std::uint64_t master_seed, std::string_view name,
                      std::size_t grid_index, std::size_t replicate) {
  return experiment_cell_stream(master_seed, name,
                                static_cast<std::int64_t>(grid_index),
                                static_cast<std::int64_t>(replicate));
}

}  // namespace

RngStream experiment_cell_stream(std::uint64_t master_seed,
                                 std::string_view name,
                                 std::int64_t grid_index,
                                 std::int64_t replicate) {
  return rng_new(master_seed).split(hash62(name)).split(grid_index).split(
      replicate);
}

namespace {

// Runs fn(0..count-1) on up to `workers` threads.  Results must be written
// into preallocated slots keyed by index so the outcome is independent of
// scheduling; the first (lowest-index) exception is rethrown.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t w = 0; w < n_threads; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

ModelParams replicate_params(const ExperimentConfig& config, double mu_norm,
                             double p, const RngStream& cell) {
  if (config.direction == DirectionMode::random) {
    RngStream dir = cell.split(3);
    return make_params(config.d, mu_norm, config.sigma, p,
                       DirectionMode::random, &dir);
  }
  return make_params(config.d, mu_norm, config.sigma, p, DirectionMode::fixed);
}

EmConfig em_from(const ExperimentConfig& config) {
  EmConfig em;
  em.max_iter = config.em_max_iter;
  em.tol = config.em_tol;
  em.restarts = config.em_restarts;
  em.variance_floor = config.em_variance_floor;
  return em;
}

struct PairSample {
  double lda = 0.0;
  double mda = 0.0;
};

SweepRow make_row(const ExperimentConfig& config, const std::string& name,
                  double value, const char* classifier, const CiTriple& ci,
                  std::optional<double> bound, bool clip_hi) {
  SweepRow row;
  row.sweep_name = name;
  row.sweep_value = value;
  row.classifier = classifier;
  row.mean_error = ci.mean;
  row.ci_lo = std::min(std::max(0.0, ci.lo), ci.mean);
  row.ci_hi = clip_hi ? std::max(std::min(1.0, ci.hi), ci.mean) : ci.hi;
  row.bound_value = bound;
  row.replicates = config.replicates;
  row.master_seed = config.master_seed;
  return row;
}

// Shared machinery for the two-classifier sweeps: runs grid x replicates
// cells (parallel over flattened slots), then folds in grid order so the
// output is byte-identical for any worker count or completion order.
SweepResult run_pair_sweep(
    const ExperimentConfig& config, const std::string& name,
    const std::vector<double>& grid, bool clip_hi,
    const std::function<std::pair<std::optional<double>, std::optional<double>>(
        double)>& bounds_of,
    const std::function<PairSample(double, const RngStream&)>& one_replicate) {
  const std::size_t reps = static_cast<std::size_t>(config.replicates);
  std::vector<PairSample> slots(grid.size() * reps);
  parallel_for(slots.size(), config.workers, [&](std::size_t slot) {
    const std::size_t gi = slot / reps;
    const std::size_t rep = slot % reps;
    const RngStream cell = cell_stream(config.master_seed, name, gi, rep);
    slots[slot] = one_replicate(grid[gi], cell);
  });

  SweepResult out;
  std::vector<double> first(reps);
  std::vector<double> second(reps);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    for (std::size_t r = 0; r < reps; ++r) {
      first[r] = slots[gi * reps + r].lda;
      second[r] = slots[gi * reps + r].mda;
    }
    const auto [lda_bound, mda_bound] = bounds_of(grid[gi]);
    out.rows.push_back(make_row(config, name, grid[gi], "lda",
                                confidence_interval(first), lda_bound, clip_hi));
    out.rows.push_back(make_row(config, name, grid[gi], "mda",
                                confidence_interval(second), mda_bound, clip_hi));
  }
  return out;
}

PairSample moment_fit_errors(const ExperimentConfig& config,
                             const ModelParams& params, double p,
                             const RngStream& cell, std::size_t n_train) {
  RngStream train_stream = cell.split(0);
  const Dataset train = sample_dataset(params, n_train, train_stream);
  RngStream test_stream = cell.split(1);
  const Dataset test =
      sample_dataset(params, static_cast<std::size_t>(config.n_test), test_stream);
  const LdaClassifier lda = fit_lda(train, config.sigma, p);
  const MdaClassifier mda = fit_mda(train, config.sigma, p);
  PairSample sample;
  sample.lda = empirical_error(
      [&](std::span<const double> x) { return lda_classify(lda, x); }, test).error;
  sample.mda = empirical_error(
      [&](std::span<const double> x) { return mda_classify(mda, x); }, test).error;
  return sample;
}

std::vector<double> resolve_arithmetic(const ExperimentConfig& config,
                                       double start, double stop, double step) {
  return arithmetic_grid(config.grid_start.value_or(start),
                         config.grid_stop.value_or(stop),
                         config.grid_step.value_or(step));
}

std::vector<double> resolve_geometric(const ExperimentConfig& config,
                                      double start, double stop, double factor) {
  return geometric_grid(config.grid_start.value_or(start),
                        config.grid_stop.value_or(stop),
                        config.grid_step.value_or(factor));
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  return os;
}

void finish_write(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("write failed: " + path);
}

std::uint64_t parse_csv_u64(std::string_view s, const std::string& path) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw IoError("bad unsigned integer field in " + path);
  return v;
}

std::string fixed2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value) {
  if (key == "d") config.d = to_bounded_int(value, key);
  else if (key == "mu_norm") config.mu_norm = to_real(value, key);
  else if (key == "sigma") config.sigma = to_real(value, key);
  else if (key == "p") config.p = to_real(value, key);
  else if (key == "n_train") config.n_train = to_bounded_int(value, key);
  else if (key == "n_test") config.n_test = to_bounded_int(value, key);
  else if (key == "replicates") config.replicates = to_bounded_int(value, key);
  else if (key == "master_seed") config.master_seed = to_uint64(value, key);
  else if (key == "direction") {
    const std::string_view v = trim(value);
    if (v == "fixed") config.direction = DirectionMode::fixed;
    else if (v == "random") config.direction = DirectionMode::random;
    else throw ConfigError("config key 'direction': expected fixed or random");
  } else if (key == "t") config.t = to_real(value, key);
  else if (key == "k_plus") config.k_plus = to_bounded_int(value, key);
  else if (key == "k_minus") config.k_minus = to_bounded_int(value, key);
  else if (key == "em_restarts") config.em_restarts = to_bounded_int(value, key);
  else if (key == "em_max_iter") config.em_max_iter = to_bounded_int(value, key);
  else if (key == "em_tol") config.em_tol = to_real(value, key);
  else if (key == "em_variance_floor") config.em_variance_floor = to_real(value, key);
  else if (key == "grid_start") config.grid_start = to_real(value, key);
  else if (key == "grid_stop") config.grid_stop = to_real(value, key);
  else if (key == "grid_step") config.grid_step = to_real(value, key);
  else if (key == "removal_fractions") config.removal_fractions = to_real_list(value, key);
  else if (key == "out_dir") config.out_dir = std::string(trim(value));
  else if (key == "workers") config.workers = to_bounded_int(value, key);
  else if (key == "lattice") config.lattice = to_bounded_int(value, key);
  else if (key == "learner") config.learner = std::string(trim(value));
  else throw ConfigError("unknown config key: '" + key + "'");
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file: " + path);
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = line;
    if (const std::size_t hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const std::size_t eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config file " + path + " line " +
                        std::to_string(line_no) + ": expected key = value");
    const std::string key{trim(view.substr(0, eq))};
    const std::string value{trim(view.substr(eq + 1))};
    apply_override(config, key, value);
  }
  return config;
}

void validate_config(const ExperimentConfig& config) {
  const auto fail = [](const std::string& message) {
    throw ConfigError("config: " + message);
  };
  if (config.d < 1) fail("d must be >= 1");
  if (!std::isfinite(config.mu_norm) || config.mu_norm <= 0.0)
    fail("mu_norm must be a positive real");
  if (!std::isfinite(config.sigma) || config.sigma <= 0.0)
    fail("sigma must be a positive real");
  if (!(config.p > 0.5) || !(config.p < 1.0)) fail("p must lie in (1/2, 1)");
  if (config.n_train < 1) fail("n_train must be >= 1");
  if (config.n_test < 1) fail("n_test must be >= 1");
  if (config.replicates < 2) fail("replicates must be >= 2 (intervals need variance)");
  if (!std::isfinite(config.t) || config.t <= 2.0) fail("t must exceed 2");
  if (config.k_plus < 1) fail("k_plus must be >= 1");
  if (config.k_minus < 1) fail("k_minus must be >= 1");
  if (config.em_restarts < 1) fail("em_restarts must be >= 1");
  if (config.em_max_iter < 1) fail("em_max_iter must be >= 1");
  if (!std::isfinite(config.em_tol) || config.em_tol <= 0.0)
    fail("em_tol must be a positive real");
  if (!std::isfinite(config.em_variance_floor) || config.em_variance_floor <= 0.0)
    fail("em_variance_floor must be a positive real");
  if (config.grid_start && !std::isfinite(*config.grid_start))
    fail("grid_start must be finite");
  if (config.grid_stop && !std::isfinite(*config.grid_stop))
    fail("grid_stop must be finite");
  if (config.grid_step && (!std::isfinite(*config.grid_step) || *config.grid_step <= 0.0))
    fail("grid_step must be a positive real");
  for (const double m : config.removal_fractions)
    if (!std::isfinite(m) || m < 0.0 || m > 90.0)
      fail("removal fractions must lie in [0, 90]");
  if (config.workers < 1) fail("workers must be >= 1");
  if (config.lattice < 2) fail("lattice must be >= 2");
  (void)learner_kind(config.learner);
}

CiTriple confidence_interval(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2)
    throw std::invalid_argument("confidence_interval: needs at least 2 samples");
  double mean = 0.0;
  for (const double s : samples) mean += s;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const double s : samples) {
    const double d = s - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double half = student_t_quantile_975(static_cast<int>(n) - 1) * sd /
                      std::sqrt(static_cast<double>(n));
  return {mean, mean - half, mean + half};
}

std::vector<double> arithmetic_grid(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop))
    throw ConfigError("grid bounds must be finite");
  if (!std::isfinite(step) || step <= 0.0)
    throw ConfigError("grid step must be positive");
  if (!(start < stop)) throw ConfigError("grid start must be below stop");
  std::vector<double> values;
  const double tol = step * 1e-9;
  for (int i = 0;; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (v > stop + tol) break;
    values.push_back(v);
    if (values.size() > 100000) throw ConfigError("grid has too many points");
  }
  return values;
}

std::vector<double> geometric_grid(double start, double stop, double factor) {
  if (!std::isfinite(start) || !std::isfinite(stop))
    throw ConfigError("grid bounds must be finite");
  if (start <= 0.0) throw ConfigError("geometric grid start must be positive");
  if (!(start < stop)) throw ConfigError("grid start must be below stop");
  if (!std::isfinite(factor) || factor <= 1.0)
    throw ConfigError("geometric grid step must exceed 1");
  std::vector<double> values;
  for (double v = start; v <= stop * (1.0 + 1e-12); v *= factor) {
    values.push_back(v);
    if (values.size() > 100000) throw ConfigError("grid has too many points");
  }
  // The stop value is always part of the grid.
  if (std::abs(values.back() - stop) <= stop * 1e-12)
    values.back() = stop;
  else
    values.push_back(stop);
  return values;
}

SweepResult run_sweep_mu(const ExperimentConfig& config) {
  validate_config(config);
  const std::vector<double> grid = resolve_arithmetic(config, 2.0, 6.0, 1.0);
  for (const double v : grid)
    if (v <= 0.0) throw ConfigError("sweep_mu: grid values must be positive");
  return run_pair_sweep(
      config, "sweep_mu", grid, /*clip_hi=*/true,
      [&](double v) {
        const double nu = v / config.sigma;
        return std::pair{std::optional(lda_error_formula(nu, config.p)),
                         std::optional(mda_error_bound(nu, config.p))};
      },
      [&](double v, const RngStream& cell) {
        const ModelParams params = replicate_params(config, v, config.p, cell);
        return moment_fit_errors(config, params, config.p, cell,
                                 static_cast<std::size_t>(config.n_train));
      });
}

SweepResult run_sweep_p(const ExperimentConfig& config) {
  validate_config(config);
  std::vector<double> grid = resolve_arithmetic(config, 0.51, 0.99, 0.02);
  for (double& v : grid) v = std::clamp(v, 0.51, 0.99);
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return run_pair_sweep(
      config, "sweep_p", grid, /*clip_hi=*/true,
      [&](double q) {
        const double nu = config.mu_norm / config.sigma;
        return std::pair{std::optional(lda_error_formula(nu, q)),
                         std::optional(mda_error_bound(nu, q))};
      },
      [&](double q, const RngStream& cell) {
        const ModelParams params =
            replicate_params(config, config.mu_norm, q, cell);
        return moment_fit_errors(config, params, q, cell,
                                 static_cast<std::size_t>(config.n_train));
      });
}

SweepResult run_scaling_n(const ExperimentConfig& config) {
  validate_config(config);
  const std::vector<double> raw = resolve_geometric(config, 1000.0, 16000.0, 4.0);
  std::vector<double> grid;
  for (const double v : raw) {
    const long long n = std::llround(v);
    if (n < 100) throw ConfigError("scale_n: every n must be >= 100");
    grid.push_back(static_cast<double>(n));
  }
  const double nu = config.mu_norm / config.sigma;
  const double lda_reference = lda_error_formula(nu, config.p);
  const double mda_reference = mda_error_bound(nu, config.p);
  return run_pair_sweep(
      config, "scale_n", grid, /*clip_hi=*/false,
      [&](double) {
        return std::pair{std::optional(lda_reference), std::optional(mda_reference)};
      },
      [&](double v, const RngStream& cell) {
        const std::size_t n = static_cast<std::size_t>(v);
        const ModelParams params =
            replicate_params(config, config.mu_norm, config.p, cell);
        const PairSample errors =
            moment_fit_errors(config, params, config.p, cell, n);
        const double scale = std::sqrt(static_cast<double>(n) /
                                       (config.d * std::log(static_cast<double>(n))));
        return PairSample{std::abs(errors.lda - lda_reference) * scale,
                          std::abs(errors.mda - mda_reference) * scale};
      });
}

SweepResult run_shifted(const ExperimentConfig& config) {
  validate_config(config);
  const std::vector<double> grid = resolve_geometric(config, 10.0, 2000.0, 10.0);
  for (const double t : grid)
    if (t <= 2.0) throw ConfigError("shifted_t: every t must exceed 2");
  const double nu = config.mu_norm / config.sigma;
  return run_pair_sweep(
      config, "shifted_t", grid, /*clip_hi=*/true,
      [&](double t) {
        return std::pair{std::optional(lda_error_shifted(nu, config.p, t)),
                         std::optional(mda_error_shifted_bound(nu, config.p, t))};
      },
      [&](double t, const RngStream& cell) {
        // Train under minority weight 1/t, evaluate under the test weight.
        const double q = 1.0 - 1.0 / t;
        const ModelParams train_params =
            replicate_params(config, config.mu_norm, q, cell);
        ModelParams test_params = train_params;
        test_params.p = config.p;
        RngStream train_stream = cell.split(0);
        const Dataset train = sample_dataset(
            train_params, static_cast<std::size_t>(config.n_train), train_stream);
        RngStream test_stream = cell.split(1);
        const Dataset test = sample_dataset(
            test_params, static_cast<std::size_t>(config.n_test), test_stream);

        // Positive-class sample mean: its expectation is mu under every
        // minority weight, so the estimate survives the shift.
        std::vector<double> mu_hat(static_cast<std::size_t>(config.d), 0.0);
        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < train.n(); ++i) {
          if (train.y[i] != +1) continue;
          const auto xi = train.point(i);
          for (std::size_t j = 0; j < mu_hat.size(); ++j) mu_hat[j] += xi[j];
          ++n_pos;
        }
        if (n_pos == 0)
          throw NumericalError("shifted_t: no positive training points");
        for (double& m : mu_hat) m /= static_cast<double>(n_pos);

        LdaClassifier lda;
        lda.mu_plus = mu_hat;
        lda.mu_minus.resize(mu_hat.size());
        for (std::size_t j = 0; j < mu_hat.size(); ++j)
          lda.mu_minus[j] = -(4.0 * q - 3.0) * mu_hat[j];
        MdaClassifier mda;
        mda.mu = mu_hat;
        mda.sigma = config.sigma;
        mda.p = q;

        PairSample sample;
        sample.lda = empirical_error(
            [&](std::span<const double> x) { return lda_classify(lda, x); }, test).error;
        sample.mda = empirical_error(
            [&](std::span<const double> x) { return mda_classify(mda, x); }, test).error;
        return sample;
      });
}

std::vector<OverparamRow> run_overparam_grid(const ExperimentConfig& config) {
  validate_config(config);
  const std::vector<double> raw = resolve_arithmetic(config, 1.0, 31.0, 10.0);
  std::vector<int> ks;
  for (const double v : raw) {
    const long long k = std::llround(v);
    if (k < 1) throw ConfigError("overparam: component counts must be >= 1");
    ks.push_back(static_cast<int>(k));
  }
  const std::size_t reps = static_cast<std::size_t>(config.replicates);
  const std::size_t n_pairs = ks.size() * ks.size();
  struct CellErrors {
    double train = 0.0;
    double test = 0.0;
  };
  std::vector<CellErrors> slots(n_pairs * reps);
  parallel_for(slots.size(), config.workers, [&](std::size_t slot) {
    const std::size_t pair_index = slot / reps;
    const std::size_t rep = slot % reps;
    const int k_plus = ks[pair_index / ks.size()];
    const int k_minus = ks[pair_index % ks.size()];
    const RngStream cell =
        cell_stream(config.master_seed, "overparam", pair_index, rep);
    const ModelParams params =
        replicate_params(config, config.mu_norm, config.p, cell);
    RngStream train_stream = cell.split(0);
    const Dataset train = sample_dataset(
        params, static_cast<std::size_t>(config.n_train), train_stream);
    RngStream test_stream = cell.split(1);
    const Dataset test = sample_dataset(
        params, static_cast<std::size_t>(config.n_test), test_stream);
    RngStream em_stream = cell.split(2);
    const GenericMdaClassifier h =
        fit_generic_mda(train, k_plus, k_minus, em_from(config), em_stream);
    const DecisionFn decide = [&](std::span<const double> x) {
      return generic_mda_classify(h, x);
    };
    slots[slot] = {empirical_error(decide, train).error,
                   empirical_error(decide, test).error};
  });

  std::vector<OverparamRow> rows;
  rows.reserve(n_pairs);
  for (std::size_t pair_index = 0; pair_index < n_pairs; ++pair_index) {
    OverparamRow row;
    row.k_plus = ks[pair_index / ks.size()];
    row.k_minus = ks[pair_index % ks.size()];
    for (std::size_t r = 0; r < reps; ++r) {
      row.train_error += slots[pair_index * reps + r].train;
      row.test_error += slots[pair_index * reps + r].test;
    }
    row.train_error /= static_cast<double>(reps);
    row.test_error /= static_cast<double>(reps);
    rows.push_back(row);
  }
  return rows;
}

std::vector<BoundaryRow> run_boundary_grid(const ExperimentConfig& config) {
  validate_config(config);
  if (config.d != 2)
    throw ConfigError("boundary: requires d = 2 (set d explicitly)");
  const RngStream cell = cell_stream(config.master_seed, "boundary", 0, 0);
  const ModelParams params =
      replicate_params(config, config.mu_norm, config.p, cell);
  RngStream train_stream = cell.split(0);
  const Dataset train = sample_dataset(
      params, static_cast<std::size_t>(config.n_train), train_stream);

  DecisionFn decide;
  switch (learner_kind(config.learner)) {
    case LearnerKind::oracle_lda: {
      const LdaClassifier h = make_oracle_lda(params);
      decide = [h](std::span<const double> x) { return lda_classify(h, x); };
      break;
    }
    case LearnerKind::oracle_mda: {
      const MdaClassifier h = make_oracle_mda(params);
      decide = [h](std::span<const double> x) { return mda_classify(h, x); };
      break;
    }
    case LearnerKind::fitted_lda: {
      const LdaClassifier h = fit_lda(train, config.sigma, config.p);
      decide = [h](std::span<const double> x) { return lda_classify(h, x); };
      break;
    }
    case LearnerKind::fitted_mda: {
      const MdaClassifier h = fit_mda(train, config.sigma, config.p);
      decide = [h](std::span<const double> x) { return mda_classify(h, x); };
      break;
    }
    case LearnerKind::generic_mda: {
      RngStream em_stream = cell.split(2);
      const GenericMdaClassifier h = fit_generic_mda(
          train, config.k_plus, config.k_minus, em_from(config), em_stream);
      decide = [h](std::span<const double> x) { return generic_mda_classify(h, x); };
      break;
    }
  }

  // Lattice over the sample's bounding box expanded by 2 sigma per side.
  double lo0 = train.x[0], hi0 = train.x[0];
  double lo1 = train.x[1], hi1 = train.x[1];
  for (std::size_t i = 0; i < train.n(); ++i) {
    const auto xi = train.point(i);
    lo0 = std::min(lo0, xi[0]);
    hi0 = std::max(hi0, xi[0]);
    lo1 = std::min(lo1, xi[1]);
    hi1 = std::max(hi1, xi[1]);
  }
  const double pad = 2.0 * config.sigma;
  lo0 -= pad; hi0 += pad; lo1 -= pad; hi1 += pad;

  const std::size_t lattice = static_cast<std::size_t>(config.lattice);
  const double step0 = (hi0 - lo0) / static_cast<double>(lattice - 1);
  const double step1 = (hi1 - lo1) / static_cast<double>(lattice - 1);
  std::vector<BoundaryRow> rows;
  rows.reserve(lattice * lattice);
  std::vector<double> x(2);
  for (std::size_t i0 = 0; i0 < lattice; ++i0) {
    x[0] = lo0 + static_cast<double>(i0) * step0;
    for (std::size_t i1 = 0; i1 < lattice; ++i1) {
      x[1] = lo1 + static_cast<double>(i1) * step1;
      rows.push_back({x[0], x[1], decide(x)});
    }
  }
  return rows;
}

std::vector<MemscoreRow> run_memscore(const ExperimentConfig& config) {
  validate_config(config);
  const LearnerKind kind = learner_kind(config.learner);
  if (kind == LearnerKind::oracle_lda || kind == LearnerKind::oracle_mda)
    throw ConfigError("memscore: requires a trained learner (fitted_lda, "
                      "fitted_mda, or generic_mda)");
  const RngStream cell = cell_stream(config.master_seed, "memscore", 0, 0);
  const ModelParams params =
      replicate_params(config, config.mu_norm, config.p, cell);
  RngStream train_stream = cell.split(0);
  const Dataset train = sample_dataset(
      params, static_cast<std::size_t>(config.n_train), train_stream);

  LearnerSpec spec;
  spec.kind = kind == LearnerKind::fitted_lda ? LearnerSpec::Kind::fitted_lda
              : kind == LearnerKind::fitted_mda ? LearnerSpec::Kind::fitted_mda
                                                : LearnerSpec::Kind::generic_mda;
  spec.sigma = config.sigma;
  spec.p = config.p;
  spec.k_plus = config.k_plus;
  spec.k_minus = config.k_minus;
  spec.em = em_from(config);
  const int restarts =
      spec.kind == LearnerSpec::Kind::generic_mda ? config.em_restarts : 1;

  const RngStream scoring_root = cell.split(4);
  std::vector<MemscoreRow> rows(train.n());
  parallel_for(train.n(), config.workers, [&](std::size_t i) {
    RngStream stream = scoring_root.split(static_cast<std::int64_t>(i));
    rows[i] = {i, train.y[i], train.k[i],
               memorization_score(spec, train, i, restarts, stream)};
  });
  return rows;
}

std::vector<std::size_t> top_scored_indices(std::span<const double> scores,
                                            std::size_t count) {
  if (count > scores.size())
    throw std::invalid_argument("top_scored_indices: count exceeds size");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  order.resize(count);
  return order;
}

SweepResult run_tail_shortening(const ExperimentConfig& config) {
  validate_config(config);
  if (config.removal_fractions.empty())
    throw ConfigError("tail_shorten: removal_fractions must be nonempty");
  const std::size_t reps = static_cast<std::size_t>(config.replicates);
  const std::size_t n_fractions = config.removal_fractions.size();
  std::vector<PairSample> slots(reps * n_fractions);

  parallel_for(reps, config.workers, [&](std::size_t rep) {
    const RngStream cell = cell_stream(config.master_seed, "tail_shorten", 0, rep);
    const ModelParams params =
        replicate_params(config, config.mu_norm, config.p, cell);
    RngStream train_stream = cell.split(0);
    const Dataset train = sample_dataset(
        params, static_cast<std::size_t>(config.n_train), train_stream);
    RngStream test_stream = cell.split(1);
    const Dataset test = sample_dataset(
        params, static_cast<std::size_t>(config.n_test), test_stream);

    // Score every training point with the flexible learner.
    LearnerSpec scorer;
    scorer.kind = LearnerSpec::Kind::fitted_mda;
    scorer.sigma = config.sigma;
    scorer.p = config.p;
    const RngStream scoring_root = cell.split(4);
    std::vector<double> scores(train.n());
    for (std::size_t i = 0; i < train.n(); ++i) {
      RngStream stream = scoring_root.split(static_cast<std::int64_t>(i));
      scores[i] = memorization_score(scorer, train, i, 1, stream);
    }

    for (std::size_t mi = 0; mi < n_fractions; ++mi) {
      const double m = config.removal_fractions[mi];
      const std::size_t count = static_cast<std::size_t>(
          std::llround(m / 100.0 * static_cast<double>(train.n())));
      const std::vector<std::size_t> removed = top_scored_indices(scores, count);
      std::vector<char> drop(train.n(), 0);
      for (const std::size_t i : removed) drop[i] = 1;
      Dataset remaining;
      remaining.d = train.d;
      for (std::size_t i = 0; i < train.n(); ++i) {
        if (drop[i]) continue;
        const auto xi = train.point(i);
        remaining.x.insert(remaining.x.end(), xi.begin(), xi.end());
        remaining.y.push_back(train.y[i]);
        remaining.k.push_back(train.k[i]);
      }
      const LdaClassifier lda = fit_lda(remaining, config.sigma, config.p);
      const MdaClassifier mda = fit_mda(remaining, config.sigma, config.p);
      PairSample sample;
      sample.lda = empirical_error(
          [&](std::span<const double> x) { return lda_classify(lda, x); }, test).error;
      sample.mda = empirical_error(
          [&](std::span<const double> x) { return mda_classify(mda, x); }, test).error;
      slots[rep * n_fractions + mi] = sample;
    }
  });

  SweepResult out;
  std::vector<double> lda_samples(reps);
  std::vector<double> mda_samples(reps);
  for (std::size_t mi = 0; mi < n_fractions; ++mi) {
    for (std::size_t r = 0; r < reps; ++r) {
      lda_samples[r] = slots[r * n_fractions + mi].lda;
      mda_samples[r] = slots[r * n_fractions + mi].mda;
    }
    const double m = config.removal_fractions[mi];
    out.rows.push_back(make_row(config, "tail_shorten", m, "lda",
                                confidence_interval(lda_samples), std::nullopt,
                                /*clip_hi=*/true));
    out.rows.push_back(make_row(config, "tail_shorten", m, "mda",
                                confidence_interval(mda_samples), std::nullopt,
                                /*clip_hi=*/true));
  }
  return out;
}

void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream os = open_for_write(path);
  os << kSweepHeader << '\n';
  for (const SweepRow& row : result.rows) {
    os << row.sweep_name << ',' << csv::format_double(row.sweep_value) << ','
       << row.classifier << ',' << csv::format_double(row.mean_error) << ','
       << csv::format_double(row.ci_lo) << ',' << csv::format_double(row.ci_hi)
       << ',' << (row.bound_value ? csv::format_double(*row.bound_value) : "")
       << ',' << row.replicates << ',' << row.master_seed << '\n';
  }
  finish_write(os, path);
}

SweepResult parse_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(is, line)) throw IoError("missing header in " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepHeader) throw IoError("unexpected header in " + path);
  SweepResult out;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw IoError("blank line in " + path);
    const std::vector<std::string_view> fields = csv::split_fields(line);
    if (fields.size() != 9) throw IoError("bad field count in " + path);
    SweepRow row;
    row.sweep_name = std::string(fields[0]);
    row.sweep_value = csv::parse_double(fields[1]);
    row.classifier = std::string(fields[2]);
    row.mean_error = csv::parse_double(fields[3]);
    row.ci_lo = csv::parse_double(fields[4]);
    row.ci_hi = csv::parse_double(fields[5]);
    if (!fields[6].empty()) row.bound_value = csv::parse_double(fields[6]);
    row.replicates = static_cast<int>(csv::parse_int(fields[7]));
    row.master_seed = parse_csv_u64(fields[8], path);
    out.rows.push_back(std::move(row));
  }
  return out;
}

void emit_svg(const SweepResult& result, const std::string& path) {
  // Fixed layout; every coordinate is written with two decimals so the file
  // is byte-stable.
  constexpr double kWidth = 720.0, kHeight = 480.0;
  constexpr double kLeft = 72.0, kRight = 24.0, kTop = 24.0, kBottom = 56.0;
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e"};

  std::vector<std::string> series;
  for (const SweepRow& row : result.rows)
    if (std::find(series.begin(), series.end(), row.classifier) == series.end())
      series.push_back(row.classifier);

  double xmin = 0.0, xmax = 1.0, ymax = 1.0;
  if (!result.rows.empty()) {
    xmin = xmax = result.rows.front().sweep_value;
    ymax = 0.0;
    for (const SweepRow& row : result.rows) {
      xmin = std::min(xmin, row.sweep_value);
      xmax = std::max(xmax, row.sweep_value);
      ymax = std::max({ymax, row.ci_hi, row.mean_error,
                       row.bound_value.value_or(0.0)});
    }
    if (xmax <= xmin) {
      xmin -= 0.5;
      xmax += 0.5;
    }
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.05;
  }
  const auto px = [&](double v) {
    return kLeft + (v - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
  };
  const auto py = [&](double e) {
    return kHeight - kBottom - e / ymax * (kHeight - kTop - kBottom);
  };

  std::ofstream os = open_for_write(path);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
        "viewBox=\"0 0 720 480\">\n"
     << "  <rect x=\"0\" y=\"0\" width=\"720\" height=\"480\" fill=\"white\"/>\n";

  // Axes with five labeled ticks per side.
  os << "  <g class=\"axes\" stroke=\"#333333\" fill=\"none\">\n"
     << "    <line x1=\"" << fixed2(kLeft) << "\" y1=\"" << fixed2(kHeight - kBottom)
     << "\" x2=\"" << fixed2(kWidth - kRight) << "\" y2=\""
     << fixed2(kHeight - kBottom) << "\"/>\n"
     << "    <line x1=\"" << fixed2(kLeft) << "\" y1=\"" << fixed2(kTop)
     << "\" x2=\"" << fixed2(kLeft) << "\" y2=\"" << fixed2(kHeight - kBottom)
     << "\"/>\n";
  for (int i = 0; i < 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yx = py(ymax * i / 4.0);
    const double gx = px(xv);
    os << "    <line x1=\"" << fixed2(gx) << "\" y1=\"" << fixed2(kHeight - kBottom)
       << "\" x2=\"" << fixed2(gx) << "\" y2=\"" << fixed2(kHeight - kBottom + 6)
       << "\"/>\n"
       << "    <line x1=\"" << fixed2(kLeft - 6) << "\" y1=\"" << fixed2(yx)
       << "\" x2=\"" << fixed2(kLeft) << "\" y2=\"" << fixed2(yx) << "\"/>\n";
  }
  os << "  </g>\n";
  for (int i = 0; i < 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymax * i / 4.0;
    os << "  <text class=\"tick-label\" x=\"" << fixed2(px(xv)) << "\" y=\""
       << fixed2(kHeight - kBottom + 22)
       << "\" font-size=\"12\" text-anchor=\"middle\">" << tick_label(xv)
       << "</text>\n"
       << "  <text class=\"tick-label\" x=\"" << fixed2(kLeft - 10) << "\" y=\""
       << fixed2(py(yv) + 4) << "\" font-size=\"12\" text-anchor=\"end\">"
       << tick_label(yv) << "</text>\n";
  }

  for (std::size_t si = 0; si < series.size(); ++si) {
    const std::string& name = series[si];
    const char* color = kPalette[si % 5];
    std::vector<const SweepRow*> rows;
    for (const SweepRow& row : result.rows)
      if (row.classifier == name) rows.push_back(&row);

    // Confidence band: upper edge forward, lower edge back.
    os << "  <polygon class=\"ci-band\" fill=\"" << color
       << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (const SweepRow* row : rows)
      os << fixed2(px(row->sweep_value)) << ',' << fixed2(py(row->ci_hi)) << ' ';
    for (auto it = rows.rbegin(); it != rows.rend(); ++it)
      os << fixed2(px((*it)->sweep_value)) << ',' << fixed2(py((*it)->ci_lo))
         << (std::next(it) == rows.rend() ? "" : " ");
    os << "\"/>\n";

    os << "  <polyline class=\"mean-line\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i)
      os << fixed2(px(rows[i]->sweep_value)) << ',' << fixed2(py(rows[i]->mean_error))
         << (i + 1 == rows.size() ? "" : " ");
    os << "\"/>\n";

    std::vector<const SweepRow*> bounded;
    for (const SweepRow* row : rows)
      if (row->bound_value) bounded.push_back(row);
    if (!bounded.empty()) {
      os << "  <polyline class=\"bound-line\" fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\" points=\"";
      for (std::size_t i = 0; i < bounded.size(); ++i)
        os << fixed2(px(bounded[i]->sweep_value)) << ','
           << fixed2(py(*bounded[i]->bound_value))
           << (i + 1 == bounded.size() ? "" : " ");
      os << "\"/>\n";
    }

    os << "  <text class=\"legend\" x=\"" << fixed2(kWidth - kRight - 120)
       << "\" y=\"" << fixed2(kTop + 18.0 * (static_cast<double>(si) + 1.0))
       << "\" font-size=\"13\" fill=\"" << color << "\">" << name << "</text>\n";
  }
  os << "</svg>\n";
  finish_write(os, path);
}

void emit_overparam_csv(const std::vector<OverparamRow>& rows,
                        const std::string& path) {
  std::ofstream os = open_for_write(path);
  os << "k_plus,k_minus,train_error,test_error\n";
  for (const OverparamRow& row : rows)
    os << row.k_plus << ',' << row.k_minus << ','
       << csv::format_double(row.train_error) << ','
       << csv::format_double(row.test_error) << '\n';
  finish_write(os, path);
}

void emit_boundary_csv(const std::vector<BoundaryRow>& rows,
                       const std::string& path) {
  std::ofstream os = open_for_write(path);
  os << "x0,x1,decision\n";
  for (const BoundaryRow& row : rows)
    os << csv::format_double(row.x0) << ',' << csv::format_double(row.x1) << ','
       << row.decision << '\n';
  finish_write(os, path);
}

void emit_memscore_csv(const std::vector<MemscoreRow>& rows,
                       const std::string& path) {
  std::ofstream os = open_for_write(path);
  os << "index,y,k,score\n";
  for (const MemscoreRow& row : rows)
    os << row.index << ',' << row.y << ',' << row.k << ','
       << csv::format_double(row.score) << '\n';
  finish_write(os, path);
}

}  // namespace ltgmm
