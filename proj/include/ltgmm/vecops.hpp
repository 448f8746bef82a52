#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace ltgmm::vec {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sqnorm(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(sqnorm(a)); }

inline double sqdist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

}  // namespace ltgmm::vec
