#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace testsupport {

inline bool approx(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol;
}

inline bool approx_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool approx_c(std::complex<double> a, std::complex<double> b,
                     double tol = 1e-12) {
  return std::abs(a - b) <= tol;
}

}  // namespace testsupport
