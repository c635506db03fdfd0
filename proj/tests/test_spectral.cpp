#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "atomdeconv/simulate.hpp"
#include "atomdeconv/spectral.hpp"
#include "support.hpp"

using namespace atomdeconv;
using testsupport::approx;
using testsupport::approx_c;
using testsupport::approx_rel;

TEST_CASE("frequency grid node exactness") {
  const FrequencyGrid g = FrequencyGrid::symmetric(3.7, 4097);
  CHECK(g.point(g.center()) == 0.0);
  CHECK(g.unit(0) == -1.0);
  CHECK(g.unit(g.n_points() - 1) == 1.0);
  for (int k = 1; k <= g.half(); k += 97) {
    CHECK(g.point(g.center() - k) == -g.point(g.center() + k));
  }
  const FrequencyGrid inner = g.central_section(100);
  for (int i = 0; i < inner.n_points(); ++i) {
    CHECK(inner.point(i) == g.point(i + g.half() - 100));
  }
  CHECK_THROWS_AS(FrequencyGrid::symmetric(1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid::symmetric(0.0, 5), std::invalid_argument);
}

TEST_CASE("simpson on polynomials") {
  const FrequencyGrid g = FrequencyGrid::symmetric(1.0, 5);
  ComplexSeries constant{g, std::vector<complex>(5, complex(1.5, 0.0))};
  CHECK(approx(simpson(constant).real(), 3.0, 1e-15));

  std::vector<complex> quad(5), lin(5);
  for (int i = 0; i < 5; ++i) {
    const double t = g.point(i);
    quad[i] = complex(t * t, 0.0);
    lin[i] = complex(t, 0.0);
  }
  CHECK(approx(simpson({g, quad}).real(), 2.0 / 3.0, 1e-15));
  CHECK(approx(simpson({g, lin}).real(), 0.0, 1e-15));

  std::vector<double> even_len(4, 1.0);
  CHECK_THROWS_AS(simpson(std::span<const double>(even_len), 0.1),
                  std::invalid_argument);
}

TEST_CASE("empirical cf examples") {
  const FrequencyGrid g = FrequencyGrid::symmetric(M_PI, 5);

  const std::vector<double> zeros{0.0, 0.0, 0.0};
  const ComplexSeries all_zero = empirical_cf(zeros, g);
  for (const complex v : all_zero.values) {
    CHECK(approx_c(v, complex(1.0, 0.0)));
  }

  const std::vector<double> single{0.83};
  const ComplexSeries one = empirical_cf(single, g);
  for (int i = 0; i < g.n_points(); ++i) {
    const double t = g.point(i);
    CHECK(approx_c(one.values[i],
                   complex(std::cos(t * 0.83), std::sin(t * 0.83))));
  }

  // two-term oracle: (e^{-i pi/2} + e^{i pi/2}) / 2 = 0
  const std::vector<double> pm{-1.0, 1.0};
  const ComplexSeries two = empirical_cf(pm, g);
  CHECK(approx_c(two.values[g.center() + 1], complex(0.0, 0.0)));

  CHECK(empirical_cf(pm, g).values[g.center()] == complex(1.0, 0.0));
  CHECK_THROWS_AS(empirical_cf(std::vector<double>{}, g),
                  std::invalid_argument);
}

TEST_CASE("empirical cf hermitian symmetry and modulus bound") {
  Rng rng(2024);
  std::vector<double> samples(400);
  for (double& z : samples) {
    z = gamma_sample(rng, 2.0, 1.0) + 3.0 * rng.next_normal();
  }
  const FrequencyGrid g = FrequencyGrid::symmetric(8.0, 1025);
  const ComplexSeries cf = empirical_cf(samples, g);
  CHECK(cf.values[g.center()] == complex(1.0, 0.0));
  for (int k = 1; k <= g.half(); ++k) {
    CHECK(approx_c(cf.values[g.center() - k],
                   std::conj(cf.values[g.center() + k])));
  }
  for (const complex v : cf.values) {
    CHECK(std::abs(v) <= 1.0 + 1e-12);
  }
}

TEST_CASE("gamma cf closed forms") {
  CHECK(gamma_cf(2.0, 1.0, 0.0) == complex(1.0, 0.0));
  // (1-i)^{-2} = i/2 and (1-i)^{-1} = (1+i)/2
  CHECK(approx_c(gamma_cf(2.0, 1.0, 1.0), complex(0.0, 0.5)));
  CHECK(approx_c(gamma_cf(1.0, 1.0, 1.0), complex(0.5, 0.5)));
  CHECK_THROWS_AS(gamma_cf(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_cf(2.0, -1.0, 1.0), std::invalid_argument);

  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const double k = 0.5 + 8.0 * rng.next_double();
    const double theta = 0.2 + 3.0 * rng.next_double();
    const double t = 20.0 * (rng.next_double() - 0.5);
    const complex v = gamma_cf(k, theta, t);
    CHECK(approx(std::abs(v),
                 std::pow(1.0 + theta * theta * t * t, -k / 2.0)));
    CHECK(approx_c(gamma_cf(k, theta, -t), std::conj(v)));
    CHECK(std::abs(v) <= 1.0 + 1e-12);
  }
}

TEST_CASE("gamma cf ordinary-smooth decay") {
  // |Phi(t)| |t|^k -> theta^{-k} as |t| -> infinity
  for (const double t : {1e3, 1e4}) {
    for (const double k : {2.0, 4.0}) {
      const double theta = 1.0;
      const double lhs = std::abs(gamma_cf(k, theta, t)) * std::pow(t, k);
      CHECK(approx_rel(lhs, std::pow(theta, -k), 1e-2));
    }
  }
}

TEST_CASE("gamma density") {
  CHECK(approx(gamma_density(1.0, 1.0, 0.0), 1.0));
  CHECK(approx(gamma_density(2.0, 1.0, 1.0), std::exp(-1.0)));
  CHECK(gamma_density(2.0, 1.0, -1.0) == 0.0);
  CHECK_THROWS_AS(gamma_density(-2.0, 1.0, 1.0), std::invalid_argument);
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double x = 40.0 * (rng.next_double() - 0.25);
    CHECK(gamma_density(3.3, 0.7, x) >= 0.0);
  }
}

TEST_CASE("kde cf examples and cross-check") {
  const std::vector<double> origin{0.0};
  CHECK(kde_cf(origin, 1.0, 0.0) == complex(1.0, 0.0));
  CHECK(approx_c(kde_cf(origin, 1.0, 1.0), complex(std::exp(-0.5), 0.0)));
  const std::vector<double> pm{-1.0, 1.0};
  CHECK(approx_c(kde_cf(pm, 1.0, M_PI / 2.0), complex(0.0, 0.0)));
  CHECK_THROWS_AS(kde_cf(std::vector<double>{}, 1.0, 1.0),
                  std::invalid_argument);

  // independent summation at random frequencies
  Rng rng(5);
  std::vector<double> calib(37);
  for (double& u : calib) {
    u = 2.0 * rng.next_normal() + 1.0;
  }
  const double b = 0.4;
  for (int i = 0; i < 10; ++i) {
    const double t = 12.0 * (rng.next_double() - 0.5);
    complex direct(0.0, 0.0);
    for (const double u : calib) {
      direct += complex(std::cos(t * u), std::sin(t * u));
    }
    direct *= std::exp(-0.5 * b * b * t * t) / static_cast<double>(calib.size());
    CHECK(approx_c(kde_cf(calib, b, t), direct, 1e-12));
    CHECK(std::abs(kde_cf(calib, b, t)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("kde density") {
  const std::vector<double> origin{0.0};
  CHECK(approx(kde_density(origin, 1.0, 0.0), 0.3989422804014327));
  const std::vector<double> pm{-0.7, 0.7};
  for (const double x : {0.3, 1.1, 2.4}) {
    CHECK(approx(kde_density(pm, 0.5, x), kde_density(pm, 0.5, -x)));
    CHECK(kde_density(pm, 0.5, x) >= 0.0);
  }
}

TEST_CASE("scott bandwidth") {
  // 100 points scaled to unit sample standard deviation
  std::vector<double> calib(100);
  const double scale = std::sqrt(99.0 / 100.0);
  for (int i = 0; i < 100; ++i) {
    calib[i] = (i % 2 == 0 ? scale : -scale);
  }
  CHECK(approx(default_bandwidth(calib), 0.3981071705534972, 1e-12));

  std::vector<double> calib32(32);
  const double s32 = 2.0 * std::sqrt(31.0 / 32.0);
  for (int i = 0; i < 32; ++i) {
    calib32[i] = (i % 2 == 0 ? s32 : -s32);
  }
  CHECK(approx(default_bandwidth(calib32), 1.0, 1e-12));

  const std::vector<double> constant(5, 3.0);
  CHECK_THROWS_AS(default_bandwidth(constant), std::invalid_argument);
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(default_bandwidth(one), std::invalid_argument);
}

TEST_CASE("noise model invariants") {
  const NoiseModel noise = NoiseModel::gamma(2.0, 1.0);
  CHECK(noise.cf(0.0) == complex(1.0, 0.0));
  CHECK(noise.nu() == 2.0);

  // density integrates to 1
  const int pts = 8193;
  std::vector<double> dens(pts);
  const double hi = 60.0;
  for (int i = 0; i < pts; ++i) {
    dens[i] = noise.density(hi * i / (pts - 1));
  }
  CHECK(approx(simpson(std::span<const double>(dens), hi / (pts - 1)), 1.0,
               1e-6));

  CHECK_THROWS_AS(NoiseModel::gamma(1.0, 1.0), std::invalid_argument);

  Rng rng(3);
  std::vector<double> calib(64);
  for (double& u : calib) {
    u = gamma_sample(rng, 2.0, 1.0);
  }
  const NoiseModel kde_noise = NoiseModel::kde(calib, 0.5);
  CHECK(kde_noise.cf(0.0) == complex(1.0, 0.0));
  CHECK(kde_noise.nu() == 2.0);
  std::vector<double> kdens(pts);
  for (int i = 0; i < pts; ++i) {
    kdens[i] = kde_noise.density(-20.0 + 60.0 * i / (pts - 1));
  }
  CHECK(approx(simpson(std::span<const double>(kdens), 60.0 / (pts - 1)), 1.0,
               1e-6));
}

TEST_CASE("cf floor clamps modulus and keeps phase") {
  const complex tiny(3e-13, -4e-13);
  const complex floored = floor_modulus(tiny, 1e-12);
  CHECK(approx(std::abs(floored), 1e-12, 1e-27));
  CHECK(approx(std::arg(floored), std::arg(tiny), 1e-12));
  const complex big(0.5, 0.25);
  CHECK(floor_modulus(big, 1e-12) == big);
  CHECK(floor_modulus(complex(0.0, 0.0), 1e-12) == complex(1e-12, 0.0));
}

TEST_CASE("hermitian symmetry across cf variants") {
  Rng rng(77);
  std::vector<double> samples(50);
  for (double& z : samples) {
    z = rng.next_normal() * 2.0 + 1.0;
  }
  const CharacteristicFunction variants[] = {
      EmpiricalCf{samples}, GammaAnalyticCf{3.0, 0.8},
      KdeCalibratedCf{samples, 0.7}};
  for (const auto& cf : variants) {
    for (int i = 0; i < 20; ++i) {
      const double t = 15.0 * (rng.next_double() - 0.5);
      CHECK(approx_c(cf_value(cf, -t), std::conj(cf_value(cf, t))));
      CHECK(std::abs(cf_value(cf, t)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("quadrature doubling gate for cf integrals") {
  Rng rng(13);
  std::vector<double> samples(300);
  for (double& z : samples) {
    z = gamma_sample(rng, 2.0, 1.0);
  }
  const CharacteristicFunction variants[] = {
      EmpiricalCf{samples}, GammaAnalyticCf{2.0, 1.0},
      GammaAnalyticCf{4.0, 1.0}, KdeCalibratedCf{samples, 0.5}};
  for (const auto& cf : variants) {
    const complex coarse =
        simpson(cf_series(cf, FrequencyGrid::symmetric(10.0, 4097)));
    const complex fine =
        simpson(cf_series(cf, FrequencyGrid::symmetric(10.0, 8193)));
    CHECK(std::abs(coarse - fine) <= 1e-6 * std::abs(fine));
  }
}
