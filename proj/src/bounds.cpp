#include "ltgmm/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "ltgmm/normal.hpp"

namespace ltgmm {

namespace {

// Clamp CDF arguments; |x| = 38 is already ~1e-316 of tail mass.
double phi_clamped(double x) {
  if (x < -38.0) x = -38.0;
  if (x > 38.0) x = 38.0;
  return std_normal_cdf(x);
}

void check_nu(double nu) {
  if (!std::isfinite(nu) || !(nu > 0.0))
    throw std::invalid_argument("nu must be finite and positive");
}

void check_p(double p, bool allow_one) {
  if (!std::isfinite(p) || !(p > 0.5) || p > 1.0 || (!allow_one && p == 1.0))
    throw std::invalid_argument(allow_one ? "p must lie in (1/2, 1]"
                                          : "p must lie in (1/2, 1)");
}

void check_t(double t) {
  if (!std::isfinite(t) || !(t > 1.0))
    throw std::invalid_argument("t must be finite and > 1");
}

}  // namespace

double lda_error_formula(double nu, double p) {
  check_nu(nu);
  check_p(p, /*allow_one=*/true);
  return 0.5 * (phi_clamped(-(2.0 * p - 1.0) * nu) +
                p * phi_clamped(-(3.0 - 2.0 * p) * nu) +
                (1.0 - p) * phi_clamped((2.0 * p + 1.0) * nu));
}

double mda_error_bound(double nu, double p) {
  check_nu(nu);
  check_p(p, /*allow_one=*/false);
  const double lp = std::log(p) / (2.0 * nu);
  const double lq = std::log(1.0 - p) / (2.0 * nu);
  return 0.5 * (phi_clamped(-nu + lp) + phi_clamped(-nu + lq) +
                p * phi_clamped(-nu - lp) + (1.0 - p) * phi_clamped(-nu - lq));
}

double gap_lower_bound(double nu, double p) {
  check_nu(nu);
  check_p(p, /*allow_one=*/false);
  return 0.5 * (1.0 - p) - std::exp(-0.5 * nu * nu);
}

double lda_error_shifted(double nu, double p, double t) {
  check_nu(nu);
  check_p(p, /*allow_one=*/true);
  check_t(t);
  const double shift = 2.0 / t;
  return 0.5 * (phi_clamped(-(1.0 - shift) * nu) +
                p * phi_clamped(-(1.0 + shift) * nu) +
                (1.0 - p) * phi_clamped((3.0 - shift) * nu));
}

double mda_error_shifted_bound(double nu, double p, double t) {
  check_nu(nu);
  check_p(p, /*allow_one=*/false);
  check_t(t);
  const double lq = std::log(1.0 - 1.0 / t) / (2.0 * nu);  // assumed majority
  const double lt = std::log(t) / (2.0 * nu);              // assumed minority
  return 0.5 * (phi_clamped(-nu + lq) + phi_clamped(-nu - lt) +
                p * phi_clamped(-nu - lq) + (1.0 - p) * phi_clamped(-nu + lt));
}

double crossover_t(double nu) {
  check_nu(nu);
  // exp overflows to +infinity past nu ~ 9.42, which is the documented
  // sentinel for "beyond double range".
  return std::exp(8.0 * nu * nu);
}

}  // namespace ltgmm
