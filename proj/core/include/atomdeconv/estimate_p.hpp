#pragma once

#include <optional>

#include "atomdeconv/kernels.hpp"
#include "atomdeconv/spectral.hpp"

namespace atomdeconv {

inline constexpr int kDefaultQuadPoints = 4097;

// One rung of the smoothness ladder: regularity s_j and the bandwidths and
// penalties derived from it.
struct GridEntry {
  int j;
  double s;       // s_j = s_max - j * eps / log(n)
  double h;       // n^{-1/(2 s_j + 2 nu)}
  double delta;   // n^{-1/(2 s_j + 2 nu + 1)}
  double kappa;   // beta sqrt(log n) n^{-(s_j + 1/2)/(2 s_j + 2 nu)}
  double rho;     // beta (log n)^{a + 1/2} n^{-s_j/(2 s_j + 2 nu + 1)}
};

struct SmoothnessGrid {
  long n = 0;
  double s_max = 0.0;
  double eps = 0.0;
  double nu = 0.0;
  double beta = 0.0;
  double a = 0.0;
  std::vector<GridEntry> entries;  // j = 0 .. k_n, k_n = floor(s_max log n / eps)
};

SmoothnessGrid build_grid(long n, double s_max, double eps, double nu,
                          double beta, double a);

// Raw kernel estimate of p at bandwidth h:
//   Re[ (h/2) * integral_{-1/h}^{1/h} Phi_K(h t) PhiZ_hat(t) / Phi_U(t) dt ].
// The integral is real up to quadrature roundoff; an imaginary residual above
// 1e-8 (relative) trips a runtime error since it signals broken Hermitian
// symmetry somewhere upstream.
double p_hat_raw(std::span<const double> samples, const NoiseModel& noise,
                 const FlatTopKernel& kernel, double h,
                 int quad_points = kDefaultQuadPoints);

// Same functional evaluated on an already-computed CF series for Z. The grid
// must span [-1/h, 1/h]. Population oracles feed exact CFs through here.
double p_hat_from_series(const ComplexSeries& phi_z, const NoiseModel& noise,
                         const FlatTopKernel& kernel, double h);

// p_hat_raw clamped to [0, 1].
double p_hat_clamped(std::span<const double> samples, const NoiseModel& noise,
                     const FlatTopKernel& kernel, double h,
                     int quad_points = kDefaultQuadPoints);

struct PerJP {
  double p_hat;
  double kappa;
};

// Lepskii selection: smallest j such that |p_hat_j - p_hat_l| < kappa_l for
// every l > j. The last index always qualifies vacuously. Requires kappa
// strictly increasing.
int lepskii_select_p(std::span<const PerJP> per_j);

// Penalty calibration beta* = 8 sqrt((2 s_max + 1) / (2 s_max + 2 nu)).
double default_beta(double s_max, double nu);

// Grid-spacing calibration: the minimizer over (0, inf) of
// (beta^2 + 1) e^{eps/nu} + s_max / eps, located by golden-section search.
double default_eps(double beta, double s_max, double nu);

struct EstimatorConfig {
  double s_max = 8.0;
  std::optional<double> beta;  // default: default_beta(s_max, nu)
  std::optional<double> eps;   // default: default_eps(beta, s_max, nu)
  double a = 1.0;              // log-exponent in tau_n and rho_{n,l}
  FlatTopKernel kernel{};      // flat-top kernel for the p side
  int quad_points = kDefaultQuadPoints;
  int threads = 1;
};

struct PEstimate {
  double value = 0.0;
  int selected_j = 0;
  double s_selected = 0.0;
  double h_selected = 0.0;
  std::vector<PerJP> per_j;
  double beta = 0.0;
  double eps = 0.0;
};

// Full adaptive estimate: build the ladder, evaluate the clamped estimator at
// every rung (independent, parallelizable), then apply the Lepskii rule.
PEstimate estimate_p_adaptive(std::span<const double> samples,
                              const NoiseModel& noise,
                              const EstimatorConfig& config);

}  // namespace atomdeconv
