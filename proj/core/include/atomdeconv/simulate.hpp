#pragma once

#include <cstdint>

#include "atomdeconv/estimate_p.hpp"

namespace atomdeconv {

// SplitMix64 stream. Draws are reproducible bit-for-bit for a given seed;
// replication streams are derived by mixing the seed with the replication
// index, so Monte-Carlo cells are independent of scheduling order.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng for_replication(std::uint64_t seed, std::uint64_t replication);

  std::uint64_t next_u64();
  double next_double();  // uniform on [0, 1)
  double next_normal();  // standard normal via the polar method

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Gamma(k, theta) draw by Marsaglia-Tsang squeeze (k >= 1); boosted from
// Gamma(k + 1) for k < 1.
double gamma_sample(Rng& rng, double k, double theta);

struct GammaParams {
  double k;
  double theta;
};

struct KdeNoiseSpec {
  std::vector<double> calibration;
  double bandwidth;
};

using NoiseSpec = std::variant<GammaParams, KdeNoiseSpec>;

// One synthetic dataset: Z = U + A X with P[A = 0] = p.
struct ModelSpec {
  double p = 0.6;
  NoiseSpec noise = GammaParams{2.0, 1.0};
  GammaParams signal{4.0, 1.0};
  long n = 0;
  std::uint64_t seed = 1;
};

std::vector<double> sample_model(const ModelSpec& spec);

// Paper-style dataset shorthand. Dataset 1: U ~ Gamma(2,1), X ~ Gamma(g,1)
// (smoothness varies). Dataset 2: U ~ Gamma(g,1), X ~ Gamma(2,1)
// (ill-posedness varies).
ModelSpec dataset_spec(int dataset, double gamma, long n, std::uint64_t seed,
                       double p = 0.6);

enum class FErrorMode { off, adaptive, known_p };

struct McStudyConfig {
  int dataset = 1;
  std::vector<double> gammas;
  std::vector<long> ns;
  int replications = 100;
  double p = 0.6;
  std::uint64_t seed = 1;
  FErrorMode f_mode = FErrorMode::off;
  EstimatorConfig est;
  int threads = 1;  // replication-level workers; estimators run serial inside
};

struct McResultRow {
  int dataset = 0;
  double gamma = 0.0;
  long n = 0;
  int replications = 0;
  double mse_p = 0.0;
  double mean_l2_f = 0.0;  // NaN when f_mode == off
  double slope = 0.0;      // log-log slope per gamma series; NaN if < 3 sizes
};

// Monte-Carlo study over the (gamma, n) grid. Replications use derived
// seeds and may run on several workers; aggregation order is fixed, so the
// result table is identical for any thread count.
std::vector<McResultRow> mc_study(const McStudyConfig& config);

// Least-squares slope of log(mse) against log(n).
double rate_fit(std::span<const long> ns, std::span<const double> mses);

// L2 distance between a pass-band-limited CF estimate and the exact
// Gamma(gamma, 1) response, i.e. ||f_hat - f||_2 by Parseval with the exact
// tail outside the pass-band.
double l2_error_vs_gamma(const ComplexSeries& phi_x, double gamma);

}  // namespace atomdeconv
