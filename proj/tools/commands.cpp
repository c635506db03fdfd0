#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "atomdeconv/estimate_f.hpp"
#include "atomdeconv/parallel.hpp"

namespace atomdeconv::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

struct LoadedInputs {
  std::vector<double> samples;
  LoadedNoise noise;
  std::string digest;
  std::vector<std::string> warnings;
  double nu_used = 0.0;
};

LoadedInputs load_inputs(const EstimateCommonOptions& options,
                         const json& settings) {
  LoadedInputs inputs{.samples = {},
                      .noise = {NoiseModel::gamma(2.0, 1.0), "", ""},
                      .digest = "",
                      .warnings = {},
                      .nu_used = 0.0};
  const std::string data_bytes = read_file_bytes(options.data);
  inputs.samples = read_column_csv(options.data, "z");
  if (options.log10_transform) {
    std::vector<double> transformed;
    transformed.reserve(inputs.samples.size());
    std::size_t dropped = 0;
    for (const double z : inputs.samples) {
      if (z > 0.0) {
        transformed.push_back(std::log10(z));
      } else {
        ++dropped;
      }
    }
    if (transformed.empty()) {
      throw std::invalid_argument(
          "--log10-transform left no usable observations");
    }
    if (dropped > 0) {
      inputs.warnings.push_back(
          "log10 transform dropped " + std::to_string(dropped) +
          " nonpositive observation(s)");
    }
    inputs.samples = std::move(transformed);
  }

  const NoiseSpecArg spec = parse_noise_spec(options.noise);
  inputs.noise = load_noise(spec, options.kde_bandwidth, options.nu);
  inputs.nu_used = inputs.noise.model.nu();

  const std::string chunks[] = {data_bytes, inputs.noise.calibration_bytes,
                                settings.dump()};
  inputs.digest = fnv1a_hex(chunks);
  return inputs;
}

json common_settings(const EstimateCommonOptions& options) {
  json settings;
  settings["noise"] = options.noise;
  settings["nu_flag"] = options.nu;
  settings["s_max"] = options.s_max;
  settings["a"] = options.a;
  settings["kernel_a"] = 1.0;
  settings["kernel_m"] = 1.0;
  settings["quad_points"] = options.quad_points;
  settings["log10_transform"] = options.log10_transform;
  if (options.beta) {
    settings["beta_flag"] = *options.beta;
  }
  if (options.eps) {
    settings["eps_flag"] = *options.eps;
  }
  if (options.kde_bandwidth) {
    settings["kde_bandwidth_flag"] = *options.kde_bandwidth;
  }
  return settings;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  out << doc.dump(2) << "\n";
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace

int effective_threads(int requested) {
  int threads = resolve_threads(requested);
  if (const char* env = std::getenv("ATOMDECONV_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) {
      threads = std::min(threads, cap);
    }
  }
  return threads;
}

int cmd_simulate(const SimulateOptions& options) {
  if (options.dataset != 1 && options.dataset != 2) {
    throw std::invalid_argument("--dataset must be 1 or 2");
  }
  if (!(options.gamma > 0.0)) {
    throw std::invalid_argument("--gamma must be > 0");
  }
  if (options.n < 1) {
    throw std::invalid_argument("--n must be >= 1");
  }
  if (!(options.p >= 0.0) || !(options.p <= 1.0)) {
    throw std::invalid_argument("--p must lie in [0, 1]");
  }
  if (options.out.empty()) {
    throw std::invalid_argument("--out is required");
  }
  const ModelSpec spec = dataset_spec(options.dataset, options.gamma,
                                      options.n, options.seed, options.p);
  const auto& noise = std::get<GammaParams>(spec.noise);
  std::cerr << "simulate: dataset " << options.dataset << ", U~Gamma("
            << noise.k << "," << noise.theta << "), X~Gamma(" << spec.signal.k
            << "," << spec.signal.theta << "), P[A=0]=" << spec.p
            << ", n=" << spec.n << ", seed=" << spec.seed << "\n";
  write_column_csv(options.out, "z", sample_model(spec));
  return 0;
}

int cmd_estimate_p(const EstimatePOptions& options) {
  const auto start = Clock::now();
  json settings = common_settings(options.common);
  LoadedInputs inputs = load_inputs(options.common, settings);

  EstimatorConfig config;
  config.s_max = options.common.s_max;
  config.beta = options.common.beta;
  config.eps = options.common.eps;
  config.a = options.common.a;
  config.quad_points = options.common.quad_points;
  config.threads = effective_threads(options.common.threads);

  const PEstimate est =
      estimate_p_adaptive(inputs.samples, inputs.noise.model, config);

  settings["beta"] = est.beta;
  settings["eps"] = est.eps;
  settings["nu"] = inputs.nu_used;
  settings["noise_model"] = inputs.noise.description;
  settings["n"] = inputs.samples.size();

  json payload;
  payload["value"] = est.value;
  payload["selected_j"] = est.selected_j;
  payload["s_selected"] = est.s_selected;
  payload["h_selected"] = est.h_selected;
  json trail = json::array();
  for (const PerJP& e : est.per_j) {
    trail.push_back({{"p_hat", e.p_hat}, {"kappa", e.kappa}});
  }
  payload["per_j"] = std::move(trail);

  if (options.subsample_curve) {
    std::vector<double> sizes, values;
    const long n = static_cast<long>(inputs.samples.size());
    for (int k = 1; k <= 10; ++k) {
      const long m = std::max<long>(8, n * k / 10);
      if (!sizes.empty() && sizes.back() == static_cast<double>(m)) {
        continue;
      }
      const std::span<const double> prefix(inputs.samples.data(),
                                           static_cast<std::size_t>(m));
      const PEstimate sub =
          estimate_p_adaptive(prefix, inputs.noise.model, config);
      sizes.push_back(static_cast<double>(m));
      values.push_back(sub.value);
    }
    write_pairs_csv(*options.subsample_curve, "n", "p_hat", sizes, values);
  }

  write_json(options.common.out,
             result_document("estimate-p", inputs.digest, ms_since(start),
                             settings, payload, inputs.warnings));
  std::cerr << "estimate-p: value=" << est.value << " (j=" << est.selected_j
            << ", s=" << est.s_selected << ", h=" << est.h_selected << ")\n";
  return 0;
}

int cmd_estimate_f(const EstimateFOptions& options) {
  const auto start = Clock::now();
  if (options.x_points < 2) {
    throw std::invalid_argument("--x-points must be >= 2");
  }
  json settings = common_settings(options.common);
  settings["x_points"] = options.x_points;
  if (options.known_p) {
    settings["known_p"] = *options.known_p;
  }
  LoadedInputs inputs = load_inputs(options.common, settings);

  FEstimatorConfig config;
  config.est.s_max = options.common.s_max;
  config.est.beta = options.common.beta;
  config.est.eps = options.common.eps;
  config.est.a = options.common.a;
  config.est.quad_points = options.common.quad_points;
  config.est.threads = effective_threads(options.common.threads);
  config.x_grid = default_x_grid(inputs.samples, options.x_points);

  const DensityEstimate est =
      options.known_p
          ? estimate_f_known_p(inputs.samples, inputs.noise.model,
                               *options.known_p, config)
          : estimate_f_adaptive(inputs.samples, inputs.noise.model, config);

  const double beta = config.est.beta.value_or(
      default_beta(config.est.s_max, inputs.noise.model.nu()));
  settings["beta"] = beta;
  settings["eps"] = config.est.eps.value_or(
      default_eps(beta, config.est.s_max, inputs.noise.model.nu()));
  settings["nu"] = inputs.nu_used;
  settings["noise_model"] = inputs.noise.description;
  settings["n"] = inputs.samples.size();

  json payload;
  payload["selected_j"] = est.selected_j;
  payload["delta_selected"] = est.delta_selected;
  payload["passband_halfwidth"] = 1.0 / est.delta_selected;
  payload["p_used"] = est.p_used;
  payload["tau"] = est.tau;
  payload["mode"] = options.known_p ? "known_p" : "adaptive";
  json trail = json::array();
  for (std::size_t j = 0; j < est.per_j_p1.size(); ++j) {
    trail.push_back({{"p1", est.per_j_p1[j]},
                     {"delta", est.per_j_delta[j]},
                     {"rho", est.per_j_rho[j]}});
  }
  payload["per_j"] = std::move(trail);

  write_pairs_csv(options.density_out, "x", "f_hat", est.x_grid,
                  est.f_values);

  const double posterior_p = options.known_p.value_or(est.p_used);
  if (options.posterior_out) {
    const std::vector<double> curve = posterior_nonresponse(
        est.x_grid, posterior_p, inputs.noise.model, est);
    write_pairs_csv(*options.posterior_out, "z", "posterior", est.x_grid,
                    curve);
  }
  if (options.fit_check_out) {
    const std::vector<double> mixture =
        mixture_density(est.x_grid, posterior_p, inputs.noise.model, est);
    write_pairs_csv(*options.fit_check_out, "z", "density_of_Z_hat",
                    est.x_grid, mixture);
  }

  write_json(options.common.out,
             result_document("estimate-f", inputs.digest, ms_since(start),
                             settings, payload, inputs.warnings));
  std::cerr << "estimate-f: pass-band half-width "
            << 1.0 / est.delta_selected << " (j=" << est.selected_j
            << "), p_used=" << est.p_used << "\n";
  return 0;
}

int cmd_mc_study(const McStudyOptions& options) {
  std::ifstream in(options.config);
  if (!in) {
    throw std::invalid_argument("cannot open config: " +
                                options.config.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("study config parse error: " +
                                std::string(e.what()));
  }
  McStudyConfig config = parse_study_config(doc);
  config.threads = effective_threads(config.threads);
  std::cerr << "mc-study: dataset " << config.dataset << ", "
            << config.gammas.size() * config.ns.size() << " cell(s) x "
            << config.replications << " replication(s) on " << config.threads
            << " thread(s)\n";
  const std::vector<McResultRow> rows = mc_study(config);
  write_mc_csv(options.out, rows);
  return 0;
}

}  // namespace atomdeconv::cli
