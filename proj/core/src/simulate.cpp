#include "atomdeconv/simulate.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "atomdeconv/estimate_f.hpp"
#include "atomdeconv/parallel.hpp"

namespace atomdeconv {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_double() - 1.0;
    v = 2.0 * next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

Rng Rng::for_replication(std::uint64_t seed, std::uint64_t replication) {
  return Rng(mix64(seed ^ (kGolden * (replication + 1))));
}

double gamma_sample(Rng& rng, double k, double theta) {
  if (!(k > 0.0) || !(theta > 0.0)) {
    throw std::invalid_argument("gamma_sample: k and theta must be > 0");
  }
  if (k < 1.0) {
    const double boost = std::pow(rng.next_double(), 1.0 / k);
    return gamma_sample(rng, k + 1.0, theta) * boost;
  }
  const double d = k - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.next_normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) {
      continue;
    }
    const double v = t * t * t;
    const double u = rng.next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) {
      return d * v * theta;
    }
    if (u > 0.0 &&
        std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v * theta;
    }
  }
}

std::vector<double> sample_model(const ModelSpec& spec) {
  if (spec.n < 1) {
    throw std::invalid_argument("sample_model: n must be >= 1");
  }
  if (!(spec.p >= 0.0) || !(spec.p <= 1.0)) {
    throw std::invalid_argument("sample_model: p must lie in [0, 1]");
  }
  if (!(spec.signal.k > 0.0) || !(spec.signal.theta > 0.0)) {
    throw std::invalid_argument("sample_model: invalid signal parameters");
  }
  if (const auto* g = std::get_if<GammaParams>(&spec.noise)) {
    if (!(g->k > 0.0) || !(g->theta > 0.0)) {
      throw std::invalid_argument("sample_model: invalid noise parameters");
    }
  } else {
    const auto& kde = std::get<KdeNoiseSpec>(spec.noise);
    if (kde.calibration.empty() || !(kde.bandwidth > 0.0)) {
      throw std::invalid_argument("sample_model: invalid KDE noise spec");
    }
  }

  Rng rng(spec.seed);
  std::vector<double> z(spec.n);
  for (long i = 0; i < spec.n; ++i) {
    double u;
    if (const auto* g = std::get_if<GammaParams>(&spec.noise)) {
      u = gamma_sample(rng, g->k, g->theta);
    } else {
      const auto& kde = std::get<KdeNoiseSpec>(spec.noise);
      const std::size_t idx =
          static_cast<std::size_t>(rng.next_u64() % kde.calibration.size());
      u = kde.calibration[idx] + kde.bandwidth * rng.next_normal();
    }
    const bool responds = rng.next_double() >= spec.p;  // P[A=0] = p
    double x = 0.0;
    if (responds) {
      x = gamma_sample(rng, spec.signal.k, spec.signal.theta);
    }
    z[i] = u + x;
  }
  return z;
}

ModelSpec dataset_spec(int dataset, double gamma, long n, std::uint64_t seed,
                       double p) {
  if (dataset != 1 && dataset != 2) {
    throw std::invalid_argument("dataset_spec: dataset must be 1 or 2");
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("dataset_spec: gamma must be > 0");
  }
  ModelSpec spec;
  spec.p = p;
  spec.n = n;
  spec.seed = seed;
  if (dataset == 1) {
    spec.noise = GammaParams{2.0, 1.0};
    spec.signal = GammaParams{gamma, 1.0};
  } else {
    spec.noise = GammaParams{gamma, 1.0};
    spec.signal = GammaParams{2.0, 1.0};
  }
  return spec;
}

double l2_error_vs_gamma(const ComplexSeries& phi_x, double gamma) {
  if (!(gamma > 0.5)) {
    throw std::invalid_argument("l2_error_vs_gamma: gamma must be > 1/2");
  }
  const FrequencyGrid& grid = phi_x.grid;
  const int n = grid.n_points();
  std::vector<double> diff2(n), exact2(n);
  for (int i = 0; i < n; ++i) {
    const double t = grid.point(i);
    const complex exact = gamma_cf(gamma, 1.0, t);
    diff2[i] = std::norm(phi_x.values[i] - exact);
    exact2[i] = std::norm(exact);
  }
  const double step = grid.step();
  const double inside = simpson(std::span<const double>(diff2), step);
  const double covered = simpson(std::span<const double>(exact2), step);
  // integral over R of (1 + t^2)^{-gamma}
  const double full =
      std::sqrt(M_PI) *
      std::exp(std::lgamma(gamma - 0.5) - std::lgamma(gamma));
  const double tail = std::max(0.0, full - covered);
  return std::sqrt((inside + tail) / (2.0 * M_PI));
}

double rate_fit(std::span<const long> ns, std::span<const double> mses) {
  if (ns.size() != mses.size() || ns.size() < 3) {
    throw std::invalid_argument("rate_fit: need at least 3 points");
  }
  const std::size_t m = ns.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (ns[i] < 2 || !(mses[i] > 0.0)) {
      throw std::invalid_argument("rate_fit: degenerate series");
    }
    xs[i] = std::log(static_cast<double>(ns[i]));
    ys[i] = std::log(mses[i]);
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw std::invalid_argument("rate_fit: degenerate series");
  }
  return sxy / sxx;
}

std::vector<McResultRow> mc_study(const McStudyConfig& config) {
  if (config.gammas.empty() || config.ns.empty()) {
    throw std::invalid_argument("mc_study: empty grid");
  }
  if (config.replications < 1) {
    throw std::invalid_argument("mc_study: need at least 1 replication");
  }
  const std::size_t cells = config.gammas.size() * config.ns.size();
  const int reps = config.replications;
  const std::size_t tasks = cells * static_cast<std::size_t>(reps);

  std::vector<double> sq_err(tasks, 0.0);
  std::vector<double> l2_err(tasks, 0.0);

  EstimatorConfig inner = config.est;
  inner.threads = 1;  // parallelism lives at the replication level

  auto run_task = [&](int task) {
    const std::size_t cell = static_cast<std::size_t>(task) / reps;
    const int rep = task % reps;
    const std::size_t gi = cell / config.ns.size();
    const std::size_t ni = cell % config.ns.size();
    const double gamma = config.gammas[gi];
    const long n = config.ns[ni];
    try {
      const std::uint64_t cell_seed =
          mix64(config.seed ^ (kGolden * (cell + 1)));
      Rng stream = Rng::for_replication(cell_seed, rep);
      ModelSpec spec =
          dataset_spec(config.dataset, gamma, n, stream.next_u64(), config.p);
      const std::vector<double> data = sample_model(spec);
      const auto& noise_params = std::get<GammaParams>(spec.noise);
      const NoiseModel noise =
          NoiseModel::gamma(noise_params.k, noise_params.theta);
      if (config.f_mode == FErrorMode::off) {
        const PEstimate est = estimate_p_adaptive(data, noise, inner);
        const double d = est.value - config.p;
        sq_err[task] = d * d;
      } else {
        FEstimatorConfig fconf;
        fconf.est = inner;
        fconf.x_grid = {0.0, 1.0, 2.0};  // phi_x is what the study scores
        const DensityEstimate est =
            config.f_mode == FErrorMode::adaptive
                ? estimate_f_adaptive(data, noise, fconf)
                : estimate_f_known_p(data, noise, config.p, fconf);
        l2_err[task] = l2_error_vs_gamma(est.phi_x, spec.signal.k);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("mc_study cell gamma=" + std::to_string(gamma) +
                               " n=" + std::to_string(n) + " rep=" +
                               std::to_string(rep) + ": " + e.what());
    }
  };
  parallel_for(static_cast<int>(tasks), config.threads, run_task);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<McResultRow> rows;
  rows.reserve(cells);
  for (std::size_t gi = 0; gi < config.gammas.size(); ++gi) {
    std::vector<long> series_n;
    std::vector<double> series_mse;
    for (std::size_t ni = 0; ni < config.ns.size(); ++ni) {
      const std::size_t cell = gi * config.ns.size() + ni;
      double acc_p = 0.0, acc_f = 0.0;
      for (int r = 0; r < reps; ++r) {
        acc_p += sq_err[cell * reps + r];
        acc_f += l2_err[cell * reps + r];
      }
      McResultRow row;
      row.dataset = config.dataset;
      row.gamma = config.gammas[gi];
      row.n = config.ns[ni];
      row.replications = reps;
      row.mse_p = config.f_mode == FErrorMode::off ? acc_p / reps : nan;
      row.mean_l2_f = config.f_mode == FErrorMode::off ? nan : acc_f / reps;
      row.slope = nan;
      rows.push_back(row);
      series_n.push_back(row.n);
      series_mse.push_back(config.f_mode == FErrorMode::off ? row.mse_p
                                                            : row.mean_l2_f);
    }
    if (series_n.size() >= 3) {
      const double slope = rate_fit(series_n, series_mse);
      for (std::size_t ni = 0; ni < config.ns.size(); ++ni) {
        rows[gi * config.ns.size() + ni].slope = slope;
      }
    }
  }
  return rows;
}

}  // namespace atomdeconv
