#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomdeconv/simulate.hpp"

namespace atomdeconv::cli {

using json = nlohmann::json;

// Single-column CSV with a mandatory header line. Samples use column "z",
// calibration files column "u". Rows that fail to parse report their line
// number.
std::vector<double> read_column_csv(const std::filesystem::path& path,
                                    const std::string& column);

void write_column_csv(const std::filesystem::path& path,
                      const std::string& column,
                      std::span<const double> values);

// Two-column CSV; NaN cells are written as "NA".
void write_pairs_csv(const std::filesystem::path& path,
                     const std::string& col_a, const std::string& col_b,
                     std::span<const double> a, std::span<const double> b);

std::string read_file_bytes(const std::filesystem::path& path);

// FNV-1a 64-bit over the concatenated input bytes, as a 16-digit hex string.
std::string fnv1a_hex(std::span<const std::string> chunks);

// Noise specification string: "gamma:k,theta" or "calib:file.csv".
struct NoiseSpecArg {
  bool is_gamma = true;
  double k = 0.0;
  double theta = 0.0;
  std::filesystem::path calibration_file;
};

NoiseSpecArg parse_noise_spec(const std::string& text);

// Builds the noise model (and returns the calibration bytes for digesting).
struct LoadedNoise {
  NoiseModel model;
  std::string calibration_bytes;  // empty for analytic noise
  std::string description;
};

LoadedNoise load_noise(const NoiseSpecArg& spec,
                       std::optional<double> kde_bandwidth, double nu);

// Monte-Carlo study configuration document. Unknown keys are rejected.
McStudyConfig parse_study_config(const json& doc);

void write_mc_csv(const std::filesystem::path& path,
                  std::span<const McResultRow> rows);

// Envelope for every estimation command's JSON output.
json result_document(const std::string& command, const std::string& digest,
                     double timing_ms, const json& settings,
                     const json& estimate,
                     const std::vector<std::string>& warnings);

}  // namespace atomdeconv::cli
