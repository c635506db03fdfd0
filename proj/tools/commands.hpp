#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "io.hpp"

namespace atomdeconv::cli {

struct SimulateOptions {
  int dataset = 1;
  double gamma = 4.0;
  long n = 1000;
  std::uint64_t seed = 1;
  double p = 0.6;
  std::filesystem::path out;
};

struct EstimateCommonOptions {
  std::filesystem::path data;
  std::string noise;
  std::optional<double> kde_bandwidth;
  double nu = 2.0;
  std::optional<double> beta;
  std::optional<double> eps;
  double s_max = 8.0;
  double a = 1.0;
  int quad_points = kDefaultQuadPoints;
  int threads = 0;
  bool log10_transform = false;
  std::filesystem::path out;
};

struct EstimatePOptions {
  EstimateCommonOptions common;
  std::optional<std::filesystem::path> subsample_curve;
};

struct EstimateFOptions {
  EstimateCommonOptions common;
  std::optional<double> known_p;
  std::filesystem::path density_out;
  std::optional<std::filesystem::path> posterior_out;
  std::optional<std::filesystem::path> fit_check_out;
  int x_points = 512;
};

struct McStudyOptions {
  std::filesystem::path config;
  std::filesystem::path out;
};

int cmd_simulate(const SimulateOptions& options);
int cmd_estimate_p(const EstimatePOptions& options);
int cmd_estimate_f(const EstimateFOptions& options);
int cmd_mc_study(const McStudyOptions& options);

// Worker count after applying the ATOMDECONV_THREADS cap (0 = auto).
int effective_threads(int requested);

}  // namespace atomdeconv::cli
