#include "ltgmm/model.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ltgmm/csvutil.hpp"
#include "ltgmm/errors.hpp"
#include "ltgmm/vecops.hpp"

namespace ltgmm {

double ModelParams::mu_norm() const { return vec::norm(mu); }

double ModelParams::nu() const { return mu_norm() / sigma; }

std::vector<double> ModelParams::mu_minus() const {
  std::vector<double> m(mu.size());
  const double scale = -(4.0 * p - 3.0);
  for (std::size_t j = 0; j < mu.size(); ++j) m[j] = scale * mu[j];
  return m;
}

std::vector<double> ModelParams::center(int k) const {
  double scale;
  switch (k) {
    case 0: scale = 1.0; break;   // positive class
    case 1: scale = -1.0; break;  // negative majority
    case 2: scale = 3.0; break;   // negative minority
    default:
      throw std::invalid_argument("ModelParams::center: tag must be 0, 1, or 2");
  }
  std::vector<double> c(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) c[j] = scale * mu[j];
  return c;
}

ModelParams make_params(int d, double mu_norm, double sigma, double p,
                        DirectionMode mode, RngStream* direction_stream) {
  if (d < 1) throw std::invalid_argument("make_params: d must be >= 1");
  if (!(mu_norm > 0.0))
    throw std::invalid_argument("make_params: mu_norm must be positive");
  if (!(sigma > 0.0))
    throw std::invalid_argument("make_params: sigma must be positive");
  if (!(p > 0.5 && p < 1.0))
    throw std::invalid_argument("make_params: p must lie in (1/2, 1)");

  ModelParams params;
  params.d = d;
  params.sigma = sigma;
  params.p = p;
  params.mu.assign(static_cast<std::size_t>(d), 0.0);

  if (mode == DirectionMode::fixed) {
    const double coord = mu_norm / std::sqrt(static_cast<double>(d));
    for (auto& m : params.mu) m = coord;
  } else {
    if (direction_stream == nullptr)
      throw std::invalid_argument(
          "make_params: random direction mode needs a stream");
    // Gaussian vector normalized to the sphere; rejection on the (measure
    // zero, but finite-precision) degenerate draw.
    double norm = 0.0;
    do {
      for (auto& m : params.mu) m = direction_stream->next_std_normal();
      norm = vec::norm(params.mu);
    } while (norm == 0.0);
    for (auto& m : params.mu) m *= mu_norm / norm;
  }
  return params;
}

Dataset sample_dataset(const ModelParams& params, std::size_t n,
                       RngStream& stream) {
  if (params.d < 1 || params.mu.size() != static_cast<std::size_t>(params.d))
    throw std::invalid_argument("sample_dataset: inconsistent params");
  Dataset data;
  data.d = params.d;
  data.y.resize(n);
  data.k.resize(n);
  data.x.resize(n * static_cast<std::size_t>(params.d));
  data.provenance = Dataset::Provenance{stream.master_seed(),
                                        stream.substream_index()};

  // Pass 1: labels and subpopulation tags.
  for (std::size_t i = 0; i < n; ++i) {
    if (stream.next_unit() < 0.5) {
      data.y[i] = +1;
      data.k[i] = 0;
    } else {
      data.y[i] = -1;
      data.k[i] = (stream.next_unit() < params.p) ? 1 : 2;
    }
  }

  // Pass 2: features around each point's component center.
  const std::array<std::vector<double>, 3> centers = {
      params.center(0), params.center(1), params.center(2)};
  const std::size_t d = static_cast<std::size_t>(params.d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double>& c = centers[static_cast<std::size_t>(data.k[i])];
    double* row = data.x.data() + i * d;
    for (std::size_t j = 0; j < d; ++j)
      row[j] = c[j] + params.sigma * stream.next_std_normal();
  }
  return data;
}

SubpopulationStats subpopulation_stats(const Dataset& data) {
  SubpopulationStats stats;
  const std::size_t d = static_cast<std::size_t>(data.d);
  std::array<std::vector<double>, 3> sums;
  for (auto& s : sums) s.assign(d, 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto tag = static_cast<std::size_t>(data.k[i]);
    if (tag > 2) throw std::invalid_argument("subpopulation_stats: bad tag");
    ++stats.count[tag];
    const std::span<const double> xi = data.point(i);
    for (std::size_t j = 0; j < d; ++j) sums[tag][j] += xi[j];
  }
  for (std::size_t t = 0; t < 3; ++t) {
    if (stats.count[t] == 0) continue;
    stats.mean[t].assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
      stats.mean[t][j] = sums[t][j] / static_cast<double>(stats.count[t]);
  }
  return stats;
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  for (int j = 0; j < data.d; ++j) out << 'x' << j << ',';
  out << "y,k\n";
  const std::size_t d = static_cast<std::size_t>(data.d);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double* row = data.x.data() + i * d;
    for (std::size_t j = 0; j < d; ++j)
      out << csv::format_double(row[j]) << ',';
    out << data.y[i] << ',' << data.k[i] << '\n';
  }
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_dataset_csv(data, out);
  if (!out) throw IoError("write failed: " + path);
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("dataset csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = csv::split_fields(line);
  if (header.size() < 3 || header[header.size() - 2] != "y" ||
      header.back() != "k")
    throw IoError("dataset csv: expected header x0,...,y,k");
  const int d = static_cast<int>(header.size()) - 2;
  for (int j = 0; j < d; ++j) {
    std::ostringstream want;
    want << 'x' << j;
    if (header[static_cast<std::size_t>(j)] != want.str())
      throw IoError("dataset csv: unexpected feature column name");
  }

  Dataset data;
  data.d = d;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = csv::split_fields(line);
    if (fields.size() != static_cast<std::size_t>(d) + 2)
      throw IoError("dataset csv: wrong field count at line " +
                    std::to_string(lineno));
    for (int j = 0; j < d; ++j)
      data.x.push_back(csv::parse_double(fields[static_cast<std::size_t>(j)]));
    const long long y = csv::parse_int(fields[static_cast<std::size_t>(d)]);
    const long long k = csv::parse_int(fields[static_cast<std::size_t>(d) + 1]);
    if (y != 1 && y != -1)
      throw IoError("dataset csv: label must be +1 or -1 at line " +
                    std::to_string(lineno));
    if (k < 0 || k > 2)
      throw IoError("dataset csv: tag must be 0, 1, or 2 at line " +
                    std::to_string(lineno));
    if ((y == 1) != (k == 0))
      throw IoError("dataset csv: tag inconsistent with label at line " +
                    std::to_string(lineno));
    data.y.push_back(static_cast<int>(y));
    data.k.push_back(static_cast<int>(k));
  }
  return data;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return read_dataset_csv(in);
}

}  // namespace ltgmm
