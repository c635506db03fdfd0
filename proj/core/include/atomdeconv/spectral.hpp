#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace atomdeconv {

using complex = std::complex<double>;

// Uniform symmetric frequency grid with an odd number of points.
// t = 0 is always a grid node (exactly), so composite Simpson applies
// directly and characteristic functions evaluate to exactly 1 at the center.
class FrequencyGrid {
public:
  // Trivial 3-node grid over [-1, 1]; placeholder state for containers.
  FrequencyGrid() = default;

  // Grid over [-t_max, t_max] with n_points nodes (odd, >= 3).
  static FrequencyGrid symmetric(double t_max, int n_points);

  // Grid with a prescribed step and `half` nodes on each side of 0.
  // Extent is half * step. Nested grids built from the same step share
  // node values bit-exactly.
  static FrequencyGrid from_step(double step, int half);

  int n_points() const { return 2 * half_ + 1; }
  int half() const { return half_; }
  int center() const { return half_; }
  double step() const { return step_; }
  double t_max() const { return half_ * step_; }
  double t_min() const { return -t_max(); }

  // Node i in [0, n_points). Exactly 0 at the center, symmetric pairs are
  // exact negations of each other.
  double point(int i) const { return (i - half_) * step_; }

  // Node position rescaled to [-1, 1]; exactly +-1 at the ends. Used to
  // evaluate compactly supported kernels without endpoint roundoff.
  double unit(int i) const {
    return static_cast<double>(i - half_) / static_cast<double>(half_);
  }

  // Central section with the same step and fewer nodes.
  FrequencyGrid central_section(int half) const;

  bool operator==(const FrequencyGrid&) const = default;

private:
  FrequencyGrid(double step, int half) : step_(step), half_(half) {}
  double step_ = 1.0;
  int half_ = 1;
};

// A complex-valued function sampled on a FrequencyGrid.
struct ComplexSeries {
  FrequencyGrid grid;
  std::vector<complex> values;
};

// Composite Simpson integral of the sampled values over the grid extent.
// Requires an odd number of nodes (guaranteed by FrequencyGrid).
complex simpson(const ComplexSeries& series);

// Composite Simpson over a raw sample vector with uniform spacing `step`.
double simpson(std::span<const double> values, double step);
complex simpson(std::span<const complex> values, double step);

// ---------------------------------------------------------------------------
// Characteristic functions
// ---------------------------------------------------------------------------

struct EmpiricalCf {
  std::vector<double> samples;
};

struct GammaAnalyticCf {
  double k;
  double theta;
};

struct KdeCalibratedCf {
  std::vector<double> calibration;
  double bandwidth;
};

using CharacteristicFunction =
    std::variant<EmpiricalCf, GammaAnalyticCf, KdeCalibratedCf>;

// Empirical characteristic function (1/n) sum_k exp(i t Z_k) on a grid.
// Evaluated with a phase recurrence per sample, re-anchored periodically and
// at t = 0, so the value at the center node is exactly 1.
ComplexSeries empirical_cf(std::span<const double> samples,
                           const FrequencyGrid& grid);

// CF of Gamma(k, theta): (1 - i theta t)^{-k}, principal branch.
complex gamma_cf(double k, double theta, double t);

// Density of Gamma(k, theta): x^{k-1} e^{-x/theta} / (Gamma(k) theta^k) on
// x > 0, zero on x < 0.
double gamma_density(double k, double theta, double x);

// CF of a Gaussian KDE built on `calibration` with bandwidth b:
// exp(-b^2 t^2 / 2) * (1/m) sum_j exp(i t U_j).
complex kde_cf(std::span<const double> calibration, double bandwidth,
               double t);

// Density of the same Gaussian KDE.
double kde_density(std::span<const double> calibration, double bandwidth,
                   double x);

// Scott's rule bandwidth: m^{-1/5} * sample standard deviation.
double default_bandwidth(std::span<const double> calibration);

// Evaluate a single CF variant at one frequency.
complex cf_value(const CharacteristicFunction& cf, double t);

// Evaluate a CF variant on a whole grid. Empirical and KDE variants use the
// fast recurrence path.
ComplexSeries cf_series(const CharacteristicFunction& cf,
                        const FrequencyGrid& grid);

// ---------------------------------------------------------------------------
// Noise model
// ---------------------------------------------------------------------------

// The known law of the baseline noise U: its CF, density, ordinary-smooth
// decay exponent nu (> 1), and the numerical floor applied to |Phi_U|
// wherever the CF appears in a denominator.
class NoiseModel {
public:
  static NoiseModel gamma(double k, double theta, double cf_floor = 1e-12);

  // KDE-calibrated noise. The KDE CF decays like a Gaussian, so it violates
  // the polynomial-decay model; `nu` is the working exponent supplied by the
  // caller (default 2) and the cf floor keeps denominators finite.
  static NoiseModel kde(std::vector<double> calibration, double bandwidth,
                        double nu = 2.0, double cf_floor = 1e-12);

  complex cf(double t) const { return cf_value(cf_, t); }

  // CF with its modulus clamped below at cf_floor, phase preserved.
  complex cf_floored(double t) const;

  double density(double x) const;
  double nu() const { return nu_; }
  double cf_floor() const { return cf_floor_; }
  const CharacteristicFunction& characteristic() const { return cf_; }

private:
  NoiseModel(CharacteristicFunction cf, double nu, double cf_floor);
  CharacteristicFunction cf_;
  double nu_;
  double cf_floor_;
};

// Apply the modulus floor to an arbitrary CF value.
complex floor_modulus(complex w, double floor);

}  // namespace atomdeconv
