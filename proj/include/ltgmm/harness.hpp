#pragma once

// Seeded Monte Carlo experiment runner: parameter sweeps, scaling checks,
// distribution-shift runs, component-count grids, decision-boundary lattices,
// tail-shortening, and CSV/SVG emission.  Every runner is deterministic in
// (config, master_seed) and independent of the worker count.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltgmm/model.hpp"
#include "ltgmm/rng.hpp"

namespace ltgmm {

// Flat experiment configuration.  Every key is settable from a config file
// (`key = value` lines, `#` comments) and overridable with `--set key=value`.
// Grid fields are optional: each runner substitutes its own default grid for
// unset fields, so a config can override just the step, say.
struct ExperimentConfig {
  int d = 50;
  double mu_norm = 2.0;
  double sigma = 1.0;
  double p = 0.9;
  int n_train = 7000;
  int n_test = 3000;
  int replicates = 10;
  std::uint64_t master_seed = 1;
  DirectionMode direction = DirectionMode::fixed;
  double t = 10.0;
  int k_plus = 1;
  int k_minus = 2;
  int em_restarts = 5;
  int em_max_iter = 500;
  double em_tol = 1e-8;
  double em_variance_floor = 1e-6;
  std::optional<double> grid_start;
  std::optional<double> grid_stop;
  std::optional<double> grid_step;
  std::vector<double> removal_fractions = {0.0, 5.0, 20.0};
  std::string out_dir = ".";
  int workers = 1;
  int lattice = 100;
  // Learner for boundary / memorization commands: one of oracle_lda,
  // oracle_mda, fitted_lda, fitted_mda, generic_mda (oracles are rejected
  // where a trained learner is required).
  std::string learner = "fitted_mda";

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses a flat key = value config file.  Unknown keys, malformed lines, and
// unreadable files are hard errors.
ExperimentConfig parse_config_file(const std::string& path);

// Applies one `key=value` override; shared by the file parser and --set.
void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value);

// Rejects out-of-domain settings (dimensions, probabilities, counts, learner
// names, removal percentages outside [0, 90], ...).
void validate_config(const ExperimentConfig& config);

// Mean and 95% confidence interval across replicates: mean +/- t_{0.975,n-1}
// * sd / sqrt(n).  Requires >= 2 samples; the returned interval is unclipped
// (aggregation clips to [0,1] where the quantity is an error rate).
struct CiTriple {
  double mean;
  double lo;
  double hi;
};
CiTriple confidence_interval(std::span<const double> samples);

// One aggregated sweep row.
struct SweepRow {
  std::string sweep_name;
  double sweep_value = 0.0;
  std::string classifier;
  double mean_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::optional<double> bound_value;
  int replicates = 0;
  std::uint64_t master_seed = 0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  bool operator==(const SweepResult&) const = default;
};

// Grid construction helpers (exposed for tests).  Arithmetic grids are
// start, start+step, ... up to stop (inclusive within a tiny tolerance);
// geometric grids multiply by `factor` and always include the stop value.
std::vector<double> arithmetic_grid(double start, double stop, double step);
std::vector<double> geometric_grid(double start, double stop, double factor);

// The determinism contract: every experiment cell (one grid value, one
// replicate) draws from the substream
//   rng_new(master_seed).split(hash(name)).split(grid_index).split(replicate)
// where `name` is the experiment's sweep name ("sweep_mu", "sweep_p",
// "scale_n", "shifted_t", "overparam", "boundary", "memscore",
// "tail_shorten").  Within a cell, child index 0 draws the training sample,
// 1 the test sample, 2 EM fitting, 3 the random direction, and 4 the
// memorization-scoring root (scoring point i uses child i of that root).
// Exposed so any cell of any run can be reproduced externally.
RngStream experiment_cell_stream(std::uint64_t master_seed,
                                 std::string_view name,
                                 std::int64_t grid_index,
                                 std::int64_t replicate);

// Signal-strength sweep: per grid value of ||mu||, trains moment-fitted
// nearest-centroid and density-threshold classifiers on fresh samples and
// reports test errors with closed-form reference columns.
SweepResult run_sweep_mu(const ExperimentConfig& config);

// Majority-weight sweep over p (grid clipped to [0.51, 0.99]).
SweepResult run_sweep_p(const ExperimentConfig& config);

// Sample-size scaling: reports |test error - closed form| * sqrt(n/(d ln n))
// per n (grid values are sample sizes, each >= 100).
SweepResult run_scaling_n(const ExperimentConfig& config);

// Tail-weight shift: per t, trains on samples with minority weight 1/t and
// evaluates on the unshifted test distribution; reference columns come from
// the shifted closed forms.  The mean estimate uses the positive-class
// sample mean, which is invariant to the shift.
SweepResult run_shifted(const ExperimentConfig& config);

// Component-count grid: per (k_plus, k_minus) pair from the grid, fits the
// EM-based classifier and reports mean training and test errors.
struct OverparamRow {
  int k_plus = 0;
  int k_minus = 0;
  double train_error = 0.0;
  double test_error = 0.0;

  bool operator==(const OverparamRow&) const = default;
};
std::vector<OverparamRow> run_overparam_grid(const ExperimentConfig& config);

// Decision labels of the configured learner on a regular 2-D lattice that
// covers the training sample's bounding box expanded by 2 sigma.  d = 2 only.
struct BoundaryRow {
  double x0 = 0.0;
  double x1 = 0.0;
  int decision = 0;

  bool operator==(const BoundaryRow&) const = default;
};
std::vector<BoundaryRow> run_boundary_grid(const ExperimentConfig& config);

// Memorization scores of every training point under the configured learner.
struct MemscoreRow {
  std::size_t index = 0;
  int y = 0;
  int k = 0;
  double score = 0.0;

  bool operator==(const MemscoreRow&) const = default;
};
std::vector<MemscoreRow> run_memscore(const ExperimentConfig& config);

// Indices of the `count` highest-scored points, ties broken by lower index.
std::vector<std::size_t> top_scored_indices(std::span<const double> scores,
                                            std::size_t count);

// Tail-shortening: scores every training point with the flexible learner,
// drops the top-m% per removal fraction, retrains both moment-fitted
// classifiers on the remainder, and reports test errors per (m, classifier).
SweepResult run_tail_shortening(const ExperimentConfig& config);

// CSV emission with the fixed header
// sweep_name,sweep_value,classifier,mean_error,ci_lo,ci_hi,bound_value,replicates,master_seed
// (LF line endings, shortest round-trip doubles, empty bound field allowed).
void emit_csv(const SweepResult& result, const std::string& path);
SweepResult parse_csv(const std::string& path);

// Structural SVG line chart: per classifier series a shaded confidence band,
// a mean polyline, and (when present) a dashed reference-value polyline.
void emit_svg(const SweepResult& result, const std::string& path);

void emit_overparam_csv(const std::vector<OverparamRow>& rows,
                        const std::string& path);
void emit_boundary_csv(const std::vector<BoundaryRow>& rows,
                       const std::string& path);
void emit_memscore_csv(const std::vector<MemscoreRow>& rows,
                       const std::string& path);

}  // namespace ltgmm
