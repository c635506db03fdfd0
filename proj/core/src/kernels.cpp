#include "atomdeconv/kernels.hpp"

#include <cmath>

namespace atomdeconv {

namespace {

constexpr int kNormalizerPoints = 4097;

double unnormalized(double a, double m, double t) {
  const double u = std::abs(t);
  if (u == 0.0 || u > 1.0) {
    return 0.0;
  }
  return std::exp(-a * std::pow(u, -m));
}

}  // namespace

double flat_top_normalizer(double a, double m) {
  if (!(a > 0.0) || !(m >= 1.0)) {
    throw std::invalid_argument("flat_top_normalizer: need a > 0 and m >= 1");
  }
  const FrequencyGrid grid = FrequencyGrid::symmetric(1.0, kNormalizerPoints);
  std::vector<double> values(grid.n_points());
  for (int i = 0; i < grid.n_points(); ++i) {
    values[i] = unnormalized(a, m, grid.unit(i));
  }
  return 0.5 * simpson(std::span<const double>(values), grid.step());
}

FlatTopKernel::FlatTopKernel(double a, double m)
    : a_(a), m_(m), normalizer_(flat_top_normalizer(a, m)) {}

double FlatTopKernel::operator()(double t) const {
  return unnormalized(a_, m_, t) / normalizer_;
}

double flat_top_eval(const FlatTopKernel& kernel, double t) {
  return kernel(t);
}

double sinc_phi(double t) { return std::abs(t) <= 1.0 ? 1.0 : 0.0; }

double sinc_x(double x) {
  if (x == 0.0) {
    return 1.0 / M_PI;
  }
  return std::sin(x) / (M_PI * x);
}

}  // namespace atomdeconv
