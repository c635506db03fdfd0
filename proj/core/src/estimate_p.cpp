#include "atomdeconv/estimate_p.hpp"

#include <algorithm>
#include <cmath>

#include "atomdeconv/parallel.hpp"

namespace atomdeconv {

SmoothnessGrid build_grid(long n, double s_max, double eps, double nu,
                          double beta, double a) {
  if (n < 8) {
    throw std::invalid_argument("build_grid: sample too small");
  }
  if (!(s_max > 0.0) || !(eps > 0.0) || !(nu > 1.0) || !(beta > 0.0) ||
      !(a > 0.0)) {
    throw std::invalid_argument("build_grid: nonpositive parameter");
  }
  const double logn = std::log(static_cast<double>(n));
  const int k_n = static_cast<int>(std::floor(s_max * logn / eps));
  SmoothnessGrid grid{n, s_max, eps, nu, beta, a, {}};
  grid.entries.reserve(k_n + 1);
  for (int j = 0; j <= k_n; ++j) {
    const double s = s_max - j * eps / logn;
    GridEntry e;
    e.j = j;
    e.s = s;
    e.h = std::pow(static_cast<double>(n), -1.0 / (2.0 * s + 2.0 * nu));
    e.delta =
        std::pow(static_cast<double>(n), -1.0 / (2.0 * s + 2.0 * nu + 1.0));
    e.kappa = beta * std::sqrt(logn) *
              std::pow(static_cast<double>(n),
                       -(s + 0.5) / (2.0 * s + 2.0 * nu));
    e.rho = beta * std::pow(logn, a + 0.5) *
            std::pow(static_cast<double>(n), -s / (2.0 * s + 2.0 * nu + 1.0));
    grid.entries.push_back(e);
  }
  return grid;
}

double p_hat_from_series(const ComplexSeries& phi_z, const NoiseModel& noise,
                         const FlatTopKernel& kernel, double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("p_hat: bandwidth must be > 0");
  }
  const FrequencyGrid& grid = phi_z.grid;
  if (static_cast<int>(phi_z.values.size()) != grid.n_points()) {
    throw std::invalid_argument("p_hat: series length does not match grid");
  }
  const int n = grid.n_points();
  std::vector<complex> integrand(n);
  for (int i = 0; i < n; ++i) {
    // unit(i) is the kernel argument h*t evaluated without endpoint roundoff.
    const double w = kernel(grid.unit(i));
    if (w == 0.0) {
      integrand[i] = complex(0.0, 0.0);
      continue;
    }
    integrand[i] = w * phi_z.values[i] / noise.cf_floored(grid.point(i));
  }
  const complex integral =
      simpson(std::span<const complex>(integrand), grid.step());
  const double re = 0.5 * h * integral.real();
  const double im = 0.5 * h * integral.imag();
  if (std::abs(im) > 1e-8 * std::max(1.0, std::abs(re))) {
    throw std::runtime_error("p_hat: imaginary residual exceeds tolerance");
  }
  return re;
}

double p_hat_raw(std::span<const double> samples, const NoiseModel& noise,
                 const FlatTopKernel& kernel, double h, int quad_points) {
  if (samples.empty()) {
    throw std::invalid_argument("p_hat: empty sample");
  }
  const FrequencyGrid grid = FrequencyGrid::symmetric(1.0 / h, quad_points);
  return p_hat_from_series(empirical_cf(samples, grid), noise, kernel, h);
}

double p_hat_clamped(std::span<const double> samples, const NoiseModel& noise,
                     const FlatTopKernel& kernel, double h, int quad_points) {
  return std::clamp(p_hat_raw(samples, noise, kernel, h, quad_points), 0.0,
                    1.0);
}

int lepskii_select_p(std::span<const PerJP> per_j) {
  if (per_j.empty()) {
    throw std::invalid_argument("lepskii_select_p: empty ladder");
  }
  for (std::size_t l = 1; l < per_j.size(); ++l) {
    if (!(per_j[l].kappa > per_j[l - 1].kappa)) {
      throw std::invalid_argument(
          "lepskii_select_p: kappa must be strictly increasing");
    }
  }
  const int k = static_cast<int>(per_j.size()) - 1;
  for (int j = 0; j < k; ++j) {
    bool admissible = true;
    for (int l = j + 1; l <= k; ++l) {
      if (!(std::abs(per_j[j].p_hat - per_j[l].p_hat) < per_j[l].kappa)) {
        admissible = false;
        break;
      }
    }
    if (admissible) {
      return j;
    }
  }
  return k;  // vacuous condition at the last rung
}

double default_beta(double s_max, double nu) {
  if (!(s_max > 0.0) || !(nu > 1.0)) {
    throw std::invalid_argument("default_beta: need s_max > 0 and nu > 1");
  }
  return 8.0 * std::sqrt((2.0 * s_max + 1.0) / (2.0 * s_max + 2.0 * nu));
}

double default_eps(double beta, double s_max, double nu) {
  if (!(beta > 0.0) || !(s_max > 0.0) || !(nu > 0.0)) {
    throw std::invalid_argument("default_eps: nonpositive parameter");
  }
  const double b2 = beta * beta + 1.0;
  auto objective = [&](double eps) {
    return b2 * std::exp(eps / nu) + s_max / eps;
  };
  // Bracket the minimum of the strictly convex objective, then golden-section.
  double lo = 1e-8;
  double hi = 1.0;
  while (objective(2.0 * hi) < objective(hi) && hi < 1e8) {
    hi *= 2.0;
  }
  hi *= 2.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-6) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  return 0.5 * (lo + hi);
}

PEstimate estimate_p_adaptive(std::span<const double> samples,
                              const NoiseModel& noise,
                              const EstimatorConfig& config) {
  const long n = static_cast<long>(samples.size());
  if (n < 8) {
    throw std::invalid_argument("estimate_p_adaptive: sample too small");
  }
  const double beta =
      config.beta.value_or(default_beta(config.s_max, noise.nu()));
  const double eps =
      config.eps.value_or(default_eps(beta, config.s_max, noise.nu()));
  const SmoothnessGrid grid =
      build_grid(n, config.s_max, eps, noise.nu(), beta, config.a);

  const int count = static_cast<int>(grid.entries.size());
  std::vector<PerJP> per_j(count);
  parallel_for(count, config.threads, [&](int j) {
    per_j[j].p_hat = p_hat_clamped(samples, noise, config.kernel,
                                   grid.entries[j].h, config.quad_points);
    per_j[j].kappa = grid.entries[j].kappa;
  });

  PEstimate out;
  out.selected_j = lepskii_select_p(per_j);
  out.value = per_j[out.selected_j].p_hat;
  out.s_selected = grid.entries[out.selected_j].s;
  out.h_selected = grid.entries[out.selected_j].h;
  out.per_j = std::move(per_j);
  out.beta = beta;
  out.eps = eps;
  return out;
}

}  // namespace atomdeconv
