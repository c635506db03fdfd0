#pragma once

#include "atomdeconv/estimate_p.hpp"

namespace atomdeconv {

// Order-preserving split at floor(n/2). The two halves feed statistically
// independent estimators (p from the first, Phi_Z from the second).
struct SplitSample {
  std::vector<double> first;
  std::vector<double> second;
};

SplitSample split(std::span<const double> samples);

// Truncation level tau_n = min((log n)^{-a}, 1/2).
double tau(long n, double a);

// Preliminary p estimate on the first half, clamped to [0, 1 - tau_n].
double p_hat_split(std::span<const double> first, const NoiseModel& noise,
                   const FlatTopKernel& kernel, double h, double tau_n,
                   int quad_points = kDefaultQuadPoints);

// Plug-in Fourier-domain estimator of Phi_X on a grid spanning the pass-band
// [-1/delta, 1/delta]:
//   (PhiZ_hat(t) - p1 Phi_U(t)) / ((1 - p1) Phi_U(t)) * Phi_Q(delta t),
// with the modulus floor applied to the denominator's Phi_U only.
ComplexSeries phi_x_hat(std::span<const double> second,
                        const NoiseModel& noise, double p1, double delta,
                        const FrequencyGrid& grid);

// Same transform applied to an existing CF series for Z (used by the
// pipeline and by population oracles).
ComplexSeries phi_x_from_series(const ComplexSeries& phi_z,
                                const NoiseModel& noise, double p1,
                                double delta);

// sqrt((1/2pi) * integral |A - B|^2 dt) over the union support. Grids must
// be identical, or share the same step with one a central section of the
// other at an even node offset; the narrower series is zero-extended (the
// literal Phi_Q cutoff). The pass-band-edge jump of the extended series is
// kept on piece boundaries, so every Simpson piece is smooth.
double l2_freq_distance(const ComplexSeries& a, const ComplexSeries& b);

// Full symmetric matrix of pairwise L2 distances (selection diagnostics).
std::vector<std::vector<double>> pairwise_l2(
    std::span<const ComplexSeries> per_j);

int lepskii_select_from_distances(
    const std::vector<std::vector<double>>& distances,
    std::span<const double> rho);

// Lepskii rule for f: smallest j with ||Phi_j - Phi_l||_2 < rho_l for all
// l > j. Requires rho strictly increasing; the last index always qualifies.
int lepskii_select_f(std::span<const ComplexSeries> per_j,
                     std::span<const double> rho);

// Fourier reconstruction f(x) = (1/2pi) integral e^{-itx} Phi(t) dt evaluated
// on x_grid. The imaginary residual must stay below 1e-8 of max|f|.
std::vector<double> invert_fourier(const ComplexSeries& phi,
                                   std::span<const double> x_grid);

// Default reconstruction grid: equispaced points spanning
// [q_{0.001} - 3 IQR, q_{0.999} + 3 IQR] of the observed sample.
std::vector<double> default_x_grid(std::span<const double> samples,
                                   int n_points = 512);

struct DensityEstimate {
  int selected_j = 0;
  double delta_selected = 0.0;
  ComplexSeries phi_x;  // selected series on [-1/delta, 1/delta]
  std::vector<double> x_grid;
  std::vector<double> f_values;
  double p_used = 0.0;
  double tau = 0.0;
  std::vector<std::vector<double>> per_j_l2;
  std::vector<double> per_j_p1;
  std::vector<double> per_j_delta;
  std::vector<double> per_j_rho;
};

struct FEstimatorConfig {
  EstimatorConfig est;
  std::vector<double> x_grid;  // empty: default grid from the data
};

// Per-rung inputs of the shared pipeline: the CF of the plug-in sample
// evaluated on each rung's own pass-band grid (endpoints exactly at
// +-1/delta_j), plus the per-rung preliminary weights.
struct FPipelineInputs {
  std::vector<ComplexSeries> phi_z_per_j;
  std::vector<double> p1_per_j;
};

// Core of both estimation modes. Pairwise distances are evaluated through
// the algebraic identity
//   Phi_j - Phi_l = (p_j - p_l) (r - q) / ((1-p_j)(1-p_l))   on the overlap,
// with r = PhiZ_hat / Phi_U(floored) and q = Phi_U / Phi_U(floored), so only
// three cumulative integrals per rung are needed and every integral runs on
// a grid whose endpoints sit exactly on the pass-band edges.
DensityEstimate estimate_f_pipeline(const FPipelineInputs& inputs,
                                    const NoiseModel& noise,
                                    const SmoothnessGrid& grid,
                                    std::span<const double> x_grid,
                                    double tau_n);

// Adaptive mode: sample splitting, per-j truncated p estimates from the
// first half, plug-in CF from the second half.
DensityEstimate estimate_f_adaptive(std::span<const double> samples,
                                    const NoiseModel& noise,
                                    const FEstimatorConfig& config);

// Known-p mode: the constant p replaces every per-j preliminary estimate and
// the full sample feeds the CF of Z.
DensityEstimate estimate_f_known_p(std::span<const double> samples,
                                   const NoiseModel& noise, double p,
                                   const FEstimatorConfig& config);

// Bayes posterior P[A = 0 | Z = z] on z_grid:
//   p g(z) / (p g(z) + (1 - p) (f * g)(z)),
// with (f * g) recovered from Phi_X * Phi_U on the pass-band and clipped
// below at 0. Points where the denominator vanishes are NaN (undefined), not
// errors. Finite outputs are clipped to [0, 1].
std::vector<double> posterior_nonresponse(std::span<const double> z_grid,
                                          double p, const NoiseModel& noise,
                                          const DensityEstimate& density);

// Mixture density p g(z) + (1 - p) (f * g)(z) implied by a density estimate
// (model-fit diagnostic; the convolution part is not clipped).
std::vector<double> mixture_density(std::span<const double> z_grid, double p,
                                    const NoiseModel& noise,
                                    const DensityEstimate& density);

}  // namespace atomdeconv
