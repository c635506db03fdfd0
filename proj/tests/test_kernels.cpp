#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "atomdeconv/kernels.hpp"
#include "support.hpp"

using namespace atomdeconv;
using testsupport::approx;

TEST_CASE("flat-top normalizer against adaptive-quadrature oracle") {
  // Frozen from two independent integrators (1e-14 abs tolerance):
  //   integral_0^1 exp(-1/t)   dt = 0.14849550677592205
  //   integral_0^1 exp(-1/t^2) dt = 0.08907385589078033
  CHECK(approx(flat_top_normalizer(1.0, 1.0), 0.14849550677592205, 1e-10));
  CHECK(approx(flat_top_normalizer(1.0, 2.0), 0.08907385589078033, 1e-10));
  CHECK_THROWS_AS(flat_top_normalizer(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(flat_top_normalizer(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("flat-top evaluation") {
  const FlatTopKernel kernel(1.0, 1.0);
  CHECK(kernel(0.0) == 0.0);
  CHECK(kernel(1.5) == 0.0);
  CHECK(kernel(-1.0001) == 0.0);
  CHECK(approx(kernel(1.0), 2.4773775931588827, 1e-9));
  CHECK(flat_top_eval(kernel, 0.25) == kernel(0.25));
  for (const double t : {0.1, 0.37, 0.92, 1.0}) {
    CHECK(kernel(t) > 0.0);
    CHECK(kernel(-t) == kernel(t));
  }
}

TEST_CASE("flat-top normalization integrates to 2") {
  for (const auto& [a, m] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {0.5, 1.0},
                             {2.0, 3.0}, {3.0, 1.5}}) {
    const FlatTopKernel kernel(a, m);
    const FrequencyGrid grid = FrequencyGrid::symmetric(1.0, 8193);
    std::vector<double> values(grid.n_points());
    for (int i = 0; i < grid.n_points(); ++i) {
      values[i] = kernel(grid.unit(i));
    }
    const double integral =
        simpson(std::span<const double>(values), grid.step());
    CHECK(approx(integral, 2.0, 1e-8));
  }
}

TEST_CASE("flatness: sup of kernel over |t|^k is attained away from 0") {
  const FlatTopKernel kernel(1.0, 1.0);
  for (const double k : {1.0, 2.0, 4.0, 8.0}) {
    double sup = 0.0;
    double arg = 0.0;
    const int scan = 100000;
    for (int i = 1; i <= scan; ++i) {
      const double t = static_cast<double>(i) / scan;
      const double ratio = kernel(t) / std::pow(t, k);
      if (ratio > sup) {
        sup = ratio;
        arg = t;
      }
    }
    CHECK(std::isfinite(sup));
    CHECK(sup > 0.0);
    CHECK(arg > 0.05);  // supremum sits well inside, not at the flat origin
  }
}

TEST_CASE("sinc kernel") {
  CHECK(sinc_phi(0.5) == 1.0);
  CHECK(sinc_phi(-1.0) == 1.0);
  CHECK(sinc_phi(1.0001) == 0.0);
  CHECK(approx(sinc_x(0.0), 0.3183098861837907, 1e-15));
  CHECK(approx(sinc_x(M_PI), 0.0, 1e-15));
}

TEST_CASE("sinc duality: inverse transform of the indicator") {
  // (1/2pi) integral_{-1}^{1} e^{-itx} dt = sin(x)/(pi x)
  const FrequencyGrid grid = FrequencyGrid::symmetric(1.0, 4097);
  std::uint64_t state = 42;
  auto next = [&state]() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const double x = 20.0 * (next() - 0.5);
    std::vector<complex> values(grid.n_points());
    for (int i = 0; i < grid.n_points(); ++i) {
      const double t = grid.point(i);
      values[i] = complex(std::cos(t * x), -std::sin(t * x));
    }
    const double numeric = (simpson({grid, values}) / (2.0 * M_PI)).real();
    CHECK(approx(numeric, sinc_x(x), 1e-6));
  }
}
