#include "atomdeconv/estimate_f.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atomdeconv/parallel.hpp"

namespace atomdeconv {

namespace {

constexpr int kPhaseResyncStride = 64;

void check_passband(const FrequencyGrid& grid, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("phi_x: delta must be > 0");
  }
  if (std::abs(grid.t_max() * delta - 1.0) > 1e-6) {
    throw std::invalid_argument("phi_x: grid must span [-1/delta, 1/delta]");
  }
}

// Quantized per-j half-counts on the master grid. Even counts keep every
// pass-band edge on a Simpson panel boundary of every wider grid.
std::vector<int> quantized_halves(const SmoothnessGrid& grid,
                                  const FrequencyGrid& master) {
  std::vector<int> halves(grid.entries.size());
  const double step = master.step();
  for (std::size_t j = 0; j < grid.entries.size(); ++j) {
    const double target = 1.0 / grid.entries[j].delta;
    long m = 2 * std::max(1L, std::lround(target / (2.0 * step)));
    m = std::min<long>(m, master.half());
    halves[j] = static_cast<int>(m);
  }
  return halves;
}

// Inverse Fourier transform (1/2pi) integral e^{-itx} phi(t) dt at one x,
// via a phase recurrence with periodic re-anchoring.
complex inverse_at(const ComplexSeries& phi, double x) {
  const FrequencyGrid& grid = phi.grid;
  const int n = grid.n_points();
  const int c = grid.center();
  const double step = grid.step();
  const double wr = std::cos(step * x);
  const double wi = -std::sin(step * x);
  double acc_re = 0.0, acc_im = 0.0;
  double vr = 0.0, vi = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i % kPhaseResyncStride == 0 || i == c) {
      const double phase = -grid.point(i) * x;
      vr = std::cos(phase);
      vi = std::sin(phase);
    }
    const double sw = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const complex& f = phi.values[i];
    acc_re += sw * (vr * f.real() - vi * f.imag());
    acc_im += sw * (vr * f.imag() + vi * f.real());
    const double nr = vr * wr - vi * wi;
    vi = vr * wi + vi * wr;
    vr = nr;
  }
  const double scale = step / 3.0 / (2.0 * M_PI);
  return complex(acc_re * scale, acc_im * scale);
}

std::vector<double> invert_checked(const ComplexSeries& phi,
                                   std::span<const double> x_grid) {
  std::vector<double> out(x_grid.size());
  double max_im = 0.0, max_abs = 0.0;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const complex v = inverse_at(phi, x_grid[i]);
    out[i] = v.real();
    max_im = std::max(max_im, std::abs(v.imag()));
    max_abs = std::max(max_abs, std::abs(v.real()));
  }
  if (max_im > 1e-8 * std::max(max_abs, 1e-300)) {
    throw std::runtime_error(
        "invert_fourier: imaginary residual exceeds tolerance");
  }
  return out;
}

}  // namespace

SplitSample split(std::span<const double> samples) {
  if (samples.size() < 8) {
    throw std::invalid_argument("split: sample too small");
  }
  const std::size_t half = samples.size() / 2;
  return SplitSample{
      std::vector<double>(samples.begin(), samples.begin() + half),
      std::vector<double>(samples.begin() + half, samples.end())};
}

double tau(long n, double a) {
  if (n < 8 || !(a > 0.0)) {
    throw std::invalid_argument("tau: need n >= 8 and a > 0");
  }
  return std::min(std::pow(std::log(static_cast<double>(n)), -a), 0.5);
}

double p_hat_split(std::span<const double> first, const NoiseModel& noise,
                   const FlatTopKernel& kernel, double h, double tau_n,
                   int quad_points) {
  if (!(tau_n > 0.0) || tau_n > 0.5) {
    throw std::invalid_argument("p_hat_split: tau must lie in (0, 1/2]");
  }
  const double raw = p_hat_raw(first, noise, kernel, h, quad_points);
  return std::max(0.0, std::min(raw, 1.0 - tau_n));
}

ComplexSeries phi_x_from_series(const ComplexSeries& phi_z,
                                const NoiseModel& noise, double p1,
                                double delta) {
  if (!(p1 >= 0.0) || p1 >= 1.0) {
    throw std::invalid_argument("phi_x: degenerate weight");
  }
  check_passband(phi_z.grid, delta);
  const FrequencyGrid& grid = phi_z.grid;
  std::vector<complex> values(grid.n_points());
  for (int i = 0; i < grid.n_points(); ++i) {
    const double t = grid.point(i);
    const complex u_raw = noise.cf(t);
    const complex u_fl = noise.cf_floored(t);
    const double q = sinc_phi(grid.unit(i));
    values[i] = q * (phi_z.values[i] - p1 * u_raw) / u_fl / (1.0 - p1);
  }
  return ComplexSeries{grid, std::move(values)};
}

ComplexSeries phi_x_hat(std::span<const double> second,
                        const NoiseModel& noise, double p1, double delta,
                        const FrequencyGrid& grid) {
  check_passband(grid, delta);
  return phi_x_from_series(empirical_cf(second, grid), noise, p1, delta);
}

double l2_freq_distance(const ComplexSeries& a, const ComplexSeries& b) {
  const ComplexSeries* narrow = &a;
  const ComplexSeries* wide = &b;
  if (narrow->grid.half() > wide->grid.half()) {
    std::swap(narrow, wide);
  }
  const int off = wide->grid.half() - narrow->grid.half();
  if (narrow->grid.step() != wide->grid.step() || off % 2 != 0) {
    throw std::invalid_argument("l2_freq_distance: incompatible grids");
  }
  const double step = wide->grid.step();

  // The zero-extended difference jumps at the narrow pass-band edge, so the
  // integral is assembled from three smooth pieces: the two flanks (|B|^2
  // alone) and the core (|B - A|^2). Edge nodes belong to both neighbouring
  // pieces with the piecewise-correct integrand value.
  std::vector<double> core(narrow->grid.n_points());
  for (int k = 0; k < narrow->grid.n_points(); ++k) {
    core[k] = std::norm(wide->values[k + off] - narrow->values[k]);
  }
  double integral = simpson(std::span<const double>(core), step);
  if (off > 0) {
    std::vector<double> flank(off + 1);
    for (int i = 0; i <= off; ++i) {
      flank[i] = std::norm(wide->values[i]);
    }
    integral += simpson(std::span<const double>(flank), step);
    const int base = off + narrow->grid.n_points() - 1;
    for (int i = 0; i <= off; ++i) {
      flank[i] = std::norm(wide->values[base + i]);
    }
    integral += simpson(std::span<const double>(flank), step);
  }
  return std::sqrt(std::max(0.0, integral) / (2.0 * M_PI));
}

std::vector<std::vector<double>> pairwise_l2(
    std::span<const ComplexSeries> per_j) {
  const std::size_t k = per_j.size();
  std::vector<std::vector<double>> d(k, std::vector<double>(k, 0.0));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = j + 1; l < k; ++l) {
      d[j][l] = d[l][j] = l2_freq_distance(per_j[j], per_j[l]);
    }
  }
  return d;
}

int lepskii_select_from_distances(
    const std::vector<std::vector<double>>& distances,
    std::span<const double> rho) {
  const int k = static_cast<int>(rho.size());
  if (k == 0 || static_cast<int>(distances.size()) != k) {
    throw std::invalid_argument("lepskii_select_f: empty or mismatched input");
  }
  for (int l = 1; l < k; ++l) {
    if (!(rho[l] > rho[l - 1])) {
      throw std::invalid_argument(
          "lepskii_select_f: rho must be strictly increasing");
    }
  }
  for (int j = 0; j + 1 < k; ++j) {
    bool admissible = true;
    for (int l = j + 1; l < k; ++l) {
      if (!(distances[j][l] < rho[l])) {
        admissible = false;
        break;
      }
    }
    if (admissible) {
      return j;
    }
  }
  return k - 1;
}

int lepskii_select_f(std::span<const ComplexSeries> per_j,
                     std::span<const double> rho) {
  if (per_j.empty() || per_j.size() != rho.size()) {
    throw std::invalid_argument("lepskii_select_f: empty or mismatched input");
  }
  return lepskii_select_from_distances(pairwise_l2(per_j), rho);
}

std::vector<double> invert_fourier(const ComplexSeries& phi,
                                   std::span<const double> x_grid) {
  if (static_cast<int>(phi.values.size()) != phi.grid.n_points()) {
    throw std::invalid_argument("invert_fourier: series length mismatch");
  }
  return invert_checked(phi, x_grid);
}

std::vector<double> default_x_grid(std::span<const double> samples,
                                   int n_points) {
  if (samples.empty() || n_points < 2) {
    throw std::invalid_argument("default_x_grid: invalid input");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double lo = quantile(0.001) - 3.0 * iqr;
  const double hi = quantile(0.999) + 3.0 * iqr;
  std::vector<double> grid(n_points);
  for (int i = 0; i < n_points; ++i) {
    grid[i] = lo + (hi - lo) * i / (n_points - 1);
  }
  return grid;
}

DensityEstimate estimate_f_from_series(const ComplexSeries& phi_z_master,
                                       std::span<const double> p1_per_j,
                                       const NoiseModel& noise,
                                       const SmoothnessGrid& grid,
                                       std::span<const double> x_grid,
                                       double tau_n) {
  const std::size_t k = grid.entries.size();
  if (k == 0 || p1_per_j.size() != k) {
    throw std::invalid_argument("estimate_f: per-j weight count mismatch");
  }
  if (x_grid.empty()) {
    throw std::invalid_argument("estimate_f: empty x grid");
  }
  const FrequencyGrid& master = phi_z_master.grid;
  if (master.half() % 2 != 0) {
    throw std::invalid_argument("estimate_f: master grid half must be even");
  }
  check_passband(master, grid.entries.back().delta);

  const std::vector<int> halves = quantized_halves(grid, master);

  // Phi_U and its floored reciprocal, shared by every rung.
  const int n = master.n_points();
  std::vector<complex> u_raw(n), u_fl_inv(n);
  for (int i = 0; i < n; ++i) {
    const double t = master.point(i);
    u_raw[i] = noise.cf(t);
    u_fl_inv[i] = 1.0 / noise.cf_floored(t);
  }

  std::vector<ComplexSeries> per_j(k);
  std::vector<double> deltas(k), rho(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double p1 = p1_per_j[j];
    if (!(p1 >= 0.0) || p1 >= 1.0) {
      throw std::invalid_argument("estimate_f: degenerate weight");
    }
    const int m = halves[j];
    const int off = master.half() - m;
    const FrequencyGrid section = master.central_section(m);
    std::vector<complex> values(section.n_points());
    for (int i = 0; i < section.n_points(); ++i) {
      values[i] =
          (phi_z_master.values[i + off] - p1 * u_raw[i + off]) *
          u_fl_inv[i + off] / (1.0 - p1);
    }
    per_j[j] = ComplexSeries{section, std::move(values)};
    deltas[j] = 1.0 / section.t_max();
    rho[j] = grid.entries[j].rho;
  }

  DensityEstimate out;
  out.per_j_l2 = pairwise_l2(per_j);
  out.selected_j = lepskii_select_from_distances(out.per_j_l2, rho);
  out.delta_selected = deltas[out.selected_j];
  out.phi_x = per_j[out.selected_j];
  out.x_grid.assign(x_grid.begin(), x_grid.end());
  out.f_values = invert_fourier(out.phi_x, out.x_grid);
  out.p_used = p1_per_j[out.selected_j];
  out.tau = tau_n;
  out.per_j_p1.assign(p1_per_j.begin(), p1_per_j.end());
  out.per_j_delta = std::move(deltas);
  out.per_j_rho = std::move(rho);
  return out;
}

namespace {

// Master grid whose extent is the widest pass-band of the ladder and whose
// half-count is even, so every rung's pass-band can be quantized onto it.
FrequencyGrid master_grid(const SmoothnessGrid& grid, int quad_points) {
  int half = (quad_points - 1) / 2;
  half -= half % 2;
  if (half < 2) {
    throw std::invalid_argument("estimate_f: quadrature grid too small");
  }
  const double widest = 1.0 / grid.entries.back().delta;
  return FrequencyGrid::from_step(widest / half, half);
}

}  // namespace

DensityEstimate estimate_f_adaptive(std::span<const double> samples,
                                    const NoiseModel& noise,
                                    const FEstimatorConfig& config) {
  const long n = static_cast<long>(samples.size());
  if (n < 8) {
    throw std::invalid_argument("estimate_f_adaptive: sample too small");
  }
  const EstimatorConfig& est = config.est;
  const double beta = est.beta.value_or(default_beta(est.s_max, noise.nu()));
  const double eps =
      est.eps.value_or(default_eps(beta, est.s_max, noise.nu()));
  const SmoothnessGrid grid =
      build_grid(n, est.s_max, eps, noise.nu(), beta, est.a);
  const double tau_n = tau(n, est.a);

  const SplitSample halves = split(samples);

  const int count = static_cast<int>(grid.entries.size());
  std::vector<double> p1(count);
  parallel_for(count, est.threads, [&](int j) {
    p1[j] = p_hat_split(halves.first, noise, est.kernel, grid.entries[j].h,
                        tau_n, est.quad_points);
  });

  const FrequencyGrid master = master_grid(grid, est.quad_points);
  const ComplexSeries phi_z = empirical_cf(halves.second, master);

  const std::vector<double> xs =
      config.x_grid.empty() ? default_x_grid(samples) : config.x_grid;
  return estimate_f_from_series(phi_z, p1, noise, grid, xs, tau_n);
}

DensityEstimate estimate_f_known_p(std::span<const double> samples,
                                   const NoiseModel& noise, double p,
                                   const FEstimatorConfig& config) {
  const long n = static_cast<long>(samples.size());
  if (n < 8) {
    throw std::invalid_argument("estimate_f_known_p: sample too small");
  }
  if (!(p >= 0.0) || p >= 1.0) {
    throw std::invalid_argument("estimate_f_known_p: degenerate weight");
  }
  const EstimatorConfig& est = config.est;
  const double beta = est.beta.value_or(default_beta(est.s_max, noise.nu()));
  const double eps =
      est.eps.value_or(default_eps(beta, est.s_max, noise.nu()));
  const SmoothnessGrid grid =
      build_grid(n, est.s_max, eps, noise.nu(), beta, est.a);

  const FrequencyGrid master = master_grid(grid, est.quad_points);
  const ComplexSeries phi_z = empirical_cf(samples, master);
  const std::vector<double> p1(grid.entries.size(), p);

  const std::vector<double> xs =
      config.x_grid.empty() ? default_x_grid(samples) : config.x_grid;
  return estimate_f_from_series(phi_z, p1, noise, grid, xs, tau(n, est.a));
}

namespace {

// (f * g) on z_grid from Phi_X * Phi_U over the pass-band.
std::vector<double> convolution_part(std::span<const double> z_grid,
                                     const NoiseModel& noise,
                                     const DensityEstimate& density) {
  const FrequencyGrid& grid = density.phi_x.grid;
  ComplexSeries product{grid, std::vector<complex>(grid.n_points())};
  for (int i = 0; i < grid.n_points(); ++i) {
    product.values[i] = density.phi_x.values[i] * noise.cf(grid.point(i));
  }
  std::vector<double> fg(z_grid.size());
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    fg[i] = inverse_at(product, z_grid[i]).real();
  }
  return fg;
}

}  // namespace

std::vector<double> posterior_nonresponse(std::span<const double> z_grid,
                                          double p, const NoiseModel& noise,
                                          const DensityEstimate& density) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("posterior_nonresponse: p must lie in [0,1]");
  }
  std::vector<double> fg = convolution_part(z_grid, noise, density);
  std::vector<double> out(z_grid.size());
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    const double g = noise.density(z_grid[i]);
    const double conv = std::max(0.0, fg[i]);
    const double denom = p * g + (1.0 - p) * conv;
    if (denom < 1e-12) {
      out[i] = std::numeric_limits<double>::quiet_NaN();
    } else {
      out[i] = std::clamp(p * g / denom, 0.0, 1.0);
    }
  }
  return out;
}

std::vector<double> mixture_density(std::span<const double> z_grid, double p,
                                    const NoiseModel& noise,
                                    const DensityEstimate& density) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("mixture_density: p must lie in [0,1]");
  }
  std::vector<double> fg = convolution_part(z_grid, noise, density);
  std::vector<double> out(z_grid.size());
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    out[i] = p * noise.density(z_grid[i]) + (1.0 - p) * fg[i];
  }
  return out;
}

}  // namespace atomdeconv
