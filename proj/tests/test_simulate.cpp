#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "atomdeconv/simulate.hpp"
#include "support.hpp"

using namespace atomdeconv;
using testsupport::approx;

namespace {

// Regularized lower incomplete gamma P(a, x): series expansion for
// x < a + 1, Lentz continued fraction otherwise. Test-only oracle for the
// Gamma CDF.
double gammp(double a, double x) {
  if (x <= 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

double gamma_cdf(double k, double theta, double x) { return gammp(k, x / theta); }

struct Moments {
  double mean;
  double var;
  double se_mean;
  double se_var;
};

Moments sample_moments(const std::vector<double>& z) {
  const double n = static_cast<double>(z.size());
  double mean = 0.0;
  for (const double v : z) mean += v;
  mean /= n;
  double var = 0.0, m4 = 0.0;
  for (const double v : z) {
    const double d = v - mean;
    var += d * d;
    m4 += d * d * d * d;
  }
  var /= n - 1.0;
  m4 /= n;
  const double se_mean = std::sqrt(var / n);
  const double se_var = std::sqrt(std::max(0.0, m4 - var * var) / n);
  return {mean, var, se_mean, se_var};
}

}  // namespace

TEST_CASE("seed determinism is bit-exact") {
  const ModelSpec spec = dataset_spec(1, 4.0, 5000, 12345);
  const std::vector<double> a = sample_model(spec);
  const std::vector<double> b = sample_model(spec);
  CHECK(a == b);

  ModelSpec other = spec;
  other.seed = 12346;
  CHECK(sample_model(other) != a);
}

TEST_CASE("replication streams differ") {
  Rng r0 = Rng::for_replication(7, 0);
  Rng r1 = Rng::for_replication(7, 1);
  Rng r2 = Rng::for_replication(7, 2);
  CHECK(r0.next_u64() != r1.next_u64());
  CHECK(r1.next_u64() != r2.next_u64());
}

TEST_CASE("moment identities of the mixture") {
  // E[Z] = E[U] + (1-p) E[X], Var(Z) = Var(U) + p(1-p)E[X]^2 + (1-p)Var(X)
  const ModelSpec spec = dataset_spec(1, 4.0, 100000, 2718);
  const std::vector<double> z = sample_model(spec);
  const Moments m = sample_moments(z);
  CHECK(std::abs(m.mean - 3.6) <= 3.0 * m.se_mean);
  CHECK(std::abs(m.var - 7.44) <= 3.0 * m.se_var);
}

TEST_CASE("moment identities for random specs") {
  Rng rng(99);
  for (int trial = 0; trial < 4; ++trial) {
    ModelSpec spec;
    spec.p = 0.1 + 0.8 * rng.next_double();
    const double ku = 1.0 + 4.0 * rng.next_double();
    const double tu = 0.5 + 1.5 * rng.next_double();
    const double kx = 1.0 + 6.0 * rng.next_double();
    const double tx = 0.5 + 1.5 * rng.next_double();
    spec.noise = GammaParams{ku, tu};
    spec.signal = GammaParams{kx, tx};
    spec.n = 150000;
    spec.seed = 1000 + trial;
    const std::vector<double> z = sample_model(spec);
    const Moments m = sample_moments(z);
    const double q = 1.0 - spec.p;
    const double mean_expect = ku * tu + q * kx * tx;
    const double var_expect = ku * tu * tu +
                              spec.p * q * (kx * tx) * (kx * tx) +
                              q * kx * tx * tx;
    CHECK(std::abs(m.mean - mean_expect) <= 3.5 * m.se_mean);
    CHECK(std::abs(m.var - var_expect) <= 3.5 * m.se_var);
  }
}

TEST_CASE("no response means Z is the noise alone") {
  ModelSpec spec = dataset_spec(1, 4.0, 100000, 31);
  spec.p = 1.0;
  const std::vector<double> z = sample_model(spec);
  const Moments m = sample_moments(z);
  CHECK(std::abs(m.mean - 2.0) <= 3.0 * m.se_mean);  // E[U] = k theta = 2
  CHECK(std::abs(m.var - 2.0) <= 3.0 * m.se_var);
}

TEST_CASE("gamma sampler passes the KS gate at the 1% level") {
  for (const auto& [k, theta] : {std::pair{2.0, 1.0}, {4.0, 1.0},
                                 {2.5, 1.3}, {0.7, 2.0}}) {
    Rng rng(777);
    const int n = 100000;
    std::vector<double> draws(n);
    for (double& d : draws) {
      d = gamma_sample(rng, k, theta);
    }
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
      const double cdf = gamma_cdf(k, theta, draws[i]);
      ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
      ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    }
    const double critical = 1.62762 / std::sqrt(static_cast<double>(n));
    CHECK(ks < critical);
  }
}

TEST_CASE("dataset wiring") {
  const ModelSpec d1 = dataset_spec(1, 6.0, 10, 1);
  CHECK(std::get<GammaParams>(d1.noise).k == 2.0);
  CHECK(d1.signal.k == 6.0);
  const ModelSpec d2 = dataset_spec(2, 6.0, 10, 1);
  CHECK(std::get<GammaParams>(d2.noise).k == 6.0);
  CHECK(d2.signal.k == 2.0);
  CHECK_THROWS_AS(dataset_spec(3, 4.0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(dataset_spec(1, -4.0, 10, 1), std::invalid_argument);
}

TEST_CASE("rate fit") {
  const std::vector<long> ns{100, 200, 500, 1000, 2000};
  std::vector<double> exact(ns.size()), flat(ns.size(), 0.37);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    exact[i] = std::pow(static_cast<double>(ns[i]), -0.75);
  }
  CHECK(approx(rate_fit(ns, exact), -0.75, 1e-12));
  CHECK(approx(rate_fit(ns, flat), 0.0, 1e-12));

  const std::vector<long> two{100, 200};
  const std::vector<double> two_mse{0.1, 0.05};
  CHECK_THROWS_AS(rate_fit(two, two_mse), std::invalid_argument);
  std::vector<double> with_zero = exact;
  with_zero[2] = 0.0;
  CHECK_THROWS_AS(rate_fit(ns, with_zero), std::invalid_argument);
}

TEST_CASE("mc study determinism and thread invariance") {
  McStudyConfig config;
  config.dataset = 1;
  config.gammas = {4.0};
  config.ns = {100, 200};
  config.replications = 3;
  config.seed = 5;
  config.est.s_max = 2.0;
  config.est.beta = 9.0;
  config.est.eps = 0.5;
  config.est.quad_points = 513;
  config.threads = 1;

  const auto serial = mc_study(config);
  config.threads = 2;
  const auto parallel = mc_study(config);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].mse_p == parallel[i].mse_p);
    CHECK(serial[i].n == parallel[i].n);
  }
  const auto again = mc_study(config);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].mse_p == again[i].mse_p);
  }
  // a 2-point series has no slope fit
  CHECK(std::isnan(serial[0].slope));
}

TEST_CASE("mc study in f mode fills the L2 column") {
  McStudyConfig config;
  config.dataset = 1;
  config.gammas = {4.0};
  config.ns = {120};
  config.replications = 2;
  config.seed = 77;
  config.est.s_max = 2.0;
  config.est.beta = 9.0;
  config.est.eps = 0.5;
  config.est.quad_points = 513;
  config.f_mode = FErrorMode::known_p;
  const auto rows = mc_study(config);
  REQUIRE(rows.size() == 1);
  CHECK(std::isnan(rows[0].mse_p));
  CHECK(std::isfinite(rows[0].mean_l2_f));
  CHECK(rows[0].mean_l2_f > 0.0);
}

TEST_CASE("l2 error against the exact response CF") {
  // a series equal to the exact CF has only the tail contribution
  const FrequencyGrid wide = FrequencyGrid::symmetric(50.0, 4097);
  ComplexSeries exact{wide, std::vector<complex>(wide.n_points())};
  for (int i = 0; i < wide.n_points(); ++i) {
    exact.values[i] = gamma_cf(4.0, 1.0, wide.point(i));
  }
  CHECK(l2_error_vs_gamma(exact, 4.0) < 1e-3);

  // the zero series has error equal to ||f||_2 = sqrt(int |Phi|^2 / 2pi)
  ComplexSeries zero{wide, std::vector<complex>(wide.n_points(),
                                                complex(0.0, 0.0))};
  const double norm_f = std::sqrt(0.9817477042468104 / (2.0 * M_PI));
  CHECK(approx(l2_error_vs_gamma(zero, 4.0), norm_f, 1e-6));
}
