#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "ltgmm/errors.hpp"
#include "ltgmm/model.hpp"
#include "ltgmm/rng.hpp"
#include "ltgmm/vecops.hpp"

using namespace ltgmm;

namespace {
double dist(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(vec::sqdist(a, b));
}
}  // namespace

TEST_CASE("make_params fixed direction and derived quantities") {
  const ModelParams params = make_params(50, 2.0, 1.0, 0.9, DirectionMode::fixed);
  CHECK(params.d == 50);
  REQUIRE(params.mu.size() == 50);
  const double coord = 2.0 / std::sqrt(50.0);
  for (double m : params.mu) CHECK(m == doctest::Approx(coord).epsilon(1e-14));
  CHECK(params.mu_norm() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(params.nu() == doctest::Approx(2.0).epsilon(1e-14));

  // Negative-class mean is -(4p-3) mu.
  const std::vector<double> mm = params.mu_minus();
  for (std::size_t j = 0; j < mm.size(); ++j)
    CHECK(mm[j] == doctest::Approx(-0.6 * params.mu[j]).epsilon(1e-12));

  // At p = 3/4 the negative-class mean sits exactly at the origin.
  const ModelParams balanced = make_params(10, 1.0, 1.0, 0.75, DirectionMode::fixed);
  for (double v : balanced.mu_minus()) CHECK(std::fabs(v) < 1e-15);

  // Component centers.
  const auto c0 = params.center(0);
  const auto c1 = params.center(1);
  const auto c2 = params.center(2);
  for (std::size_t j = 0; j < 50; ++j) {
    CHECK(c0[j] == doctest::Approx(params.mu[j]));
    CHECK(c1[j] == doctest::Approx(-params.mu[j]));
    CHECK(c2[j] == doctest::Approx(3.0 * params.mu[j]));
  }
  CHECK_THROWS_AS((void)params.center(3), std::invalid_argument);
}

TEST_CASE("make_params rejects invalid arguments") {
  CHECK_THROWS_AS((void)make_params(0, 2, 1, 0.9, DirectionMode::fixed),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_params(10, 0, 1, 0.9, DirectionMode::fixed),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_params(10, 2, 0, 0.9, DirectionMode::fixed),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_params(10, 2, 1, 0.5, DirectionMode::fixed),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_params(10, 2, 1, 1.0, DirectionMode::fixed),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_params(10, 2, 1, 0.9, DirectionMode::random, nullptr),
                  std::invalid_argument);
}

TEST_CASE("make_params random direction lies on the sphere and varies by stream") {
  RngStream s1 = rng_new(11);
  RngStream s2 = rng_new(12);
  const ModelParams a = make_params(40, 3.0, 1.0, 0.9, DirectionMode::random, &s1);
  const ModelParams b = make_params(40, 3.0, 1.0, 0.9, DirectionMode::random, &s2);
  CHECK(a.mu_norm() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(b.mu_norm() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(dist(a.mu, b.mu) > 1e-3);
  // Same stream identity gives the same direction.
  RngStream s1again = rng_new(11);
  const ModelParams a2 = make_params(40, 3.0, 1.0, 0.9, DirectionMode::random, &s1again);
  CHECK(dist(a.mu, a2.mu) == 0.0);
}

TEST_CASE("sample_dataset composition matches the mixture definition") {
  const ModelParams params = make_params(50, 2.0, 1.0, 0.9, DirectionMode::fixed);
  RngStream stream = rng_new(1).split(3);
  const std::size_t n = 100000;
  const Dataset data = sample_dataset(params, n, stream);
  REQUIRE(data.n() == n);
  REQUIRE(data.x.size() == n * 50);
  CHECK(data.provenance.has_value());
  CHECK(data.provenance->master_seed == 1);

  std::size_t pos = 0, neg_major = 0, neg_minor = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.y[i] == 1) {
      CHECK(data.k[i] == 0);
      ++pos;
    } else {
      REQUIRE(data.y[i] == -1);
      if (data.k[i] == 1) ++neg_major;
      else if (data.k[i] == 2) ++neg_minor;
      else FAIL("unexpected tag");
    }
  }
  CHECK(std::fabs(pos / double(n) - 0.5) < 0.01);
  CHECK(std::fabs(neg_major / double(neg_major + neg_minor) - 0.9) < 0.01);
}

TEST_CASE("negative-class sample mean matches the mixture mean identity") {
  const ModelParams params = make_params(50, 2.0, 1.0, 0.9, DirectionMode::fixed);
  RngStream stream = rng_new(2).split(0);
  const Dataset data = sample_dataset(params, 100000, stream);
  const std::vector<double> target = params.mu_minus();
  std::vector<double> acc(50, 0.0);
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.y[i] != -1) continue;
    ++cnt;
    const auto xi = data.point(i);
    for (std::size_t j = 0; j < 50; ++j) acc[j] += xi[j];
  }
  for (auto& v : acc) v /= static_cast<double>(cnt);
  CHECK(dist(acc, target) < 0.06);
}

TEST_CASE("subpopulation_stats recovers counts, centers, and spread") {
  const ModelParams params = make_params(50, 2.0, 1.0, 0.9, DirectionMode::fixed);
  RngStream stream = rng_new(3).split(0);
  const std::size_t n = 100000;
  const Dataset data = sample_dataset(params, n, stream);
  const SubpopulationStats stats = subpopulation_stats(data);

  CHECK(stats.count[0] + stats.count[1] + stats.count[2] == n);
  CHECK(std::fabs(stats.count[0] / double(n) - 0.5) < 0.01);
  CHECK(std::fabs(stats.count[1] / double(n) - 0.45) < 0.01);
  CHECK(std::fabs(stats.count[2] / double(n) - 0.05) < 0.005);

  CHECK(dist(stats.mean[0], params.center(0)) < 0.1);
  CHECK(dist(stats.mean[1], params.center(1)) < 0.1);
  CHECK(dist(stats.mean[2], params.center(2)) < 0.25);

  // Pooled within-subpopulation variance is sigma^2 per coordinate.
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = data.point(i);
    const auto& m = stats.mean[static_cast<std::size_t>(data.k[i])];
    for (std::size_t j = 0; j < 50; ++j) {
      const double diff = xi[j] - m[j];
      ss += diff * diff;
    }
  }
  const double pooled = ss / (static_cast<double>(n) * 50.0);
  CHECK(std::fabs(pooled - 1.0) < 0.05);
}

TEST_CASE("label sequence does not depend on dimension") {
  const ModelParams low = make_params(5, 2.0, 1.0, 0.9, DirectionMode::fixed);
  const ModelParams high = make_params(50, 2.0, 1.0, 0.9, DirectionMode::fixed);
  RngStream s1 = rng_new(17).split(4);
  RngStream s2 = rng_new(17).split(4);
  const Dataset a = sample_dataset(low, 5000, s1);
  const Dataset b = sample_dataset(high, 5000, s2);
  CHECK(a.y == b.y);
  CHECK(a.k == b.k);
}

TEST_CASE("sample_dataset is reproducible from the stream identity") {
  const ModelParams params = make_params(20, 2.0, 1.0, 0.9, DirectionMode::fixed);
  RngStream s1 = rng_new(8).split(1);
  RngStream s2 = rng_new(8).split(1);
  const Dataset a = sample_dataset(params, 1000, s1);
  const Dataset b = sample_dataset(params, 1000, s2);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.k == b.k);
}

TEST_CASE("dataset csv round trip preserves every bit") {
  const ModelParams params = make_params(7, 2.0, 1.3, 0.8, DirectionMode::fixed);
  RngStream stream = rng_new(5).split(2);
  const Dataset data = sample_dataset(params, 500, stream);

  std::ostringstream out;
  write_dataset_csv(data, out);
  std::istringstream in(out.str());
  const Dataset back = read_dataset_csv(in);

  CHECK(back.d == data.d);
  REQUIRE(back.n() == data.n());
  CHECK(back.x == data.x);  // exact: shortest round-trip formatting
  CHECK(back.y == data.y);
  CHECK(back.k == data.k);

  // Header shape.
  const std::string text = out.str();
  CHECK(text.rfind("x0,x1,x2,x3,x4,x5,x6,y,k\n", 0) == 0);
}

TEST_CASE("dataset csv rejects malformed input") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_dataset_csv(in);
  };
  CHECK_THROWS_AS((void)parse(""), IoError);
  CHECK_THROWS_AS((void)parse("a,b,c\n"), IoError);
  CHECK_THROWS_AS((void)parse("x0,y,k\n1.0,2,0\n"), IoError);      // bad label
  CHECK_THROWS_AS((void)parse("x0,y,k\n1.0,1,3\n"), IoError);      // bad tag
  CHECK_THROWS_AS((void)parse("x0,y,k\n1.0,1,1\n"), IoError);      // tag/label clash
  CHECK_THROWS_AS((void)parse("x0,y,k\n1.0,1\n"), IoError);        // short row
  CHECK_THROWS_AS((void)parse("x0,y,k\nzap,1,0\n"), IoError);      // junk number
  // Empty body is valid.
  const Dataset empty = parse("x0,x1,y,k\n");
  CHECK(empty.d == 2);
  CHECK(empty.n() == 0);
}
