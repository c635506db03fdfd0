#include "io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace atomdeconv::cli {

namespace {

std::string trim_cr(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
    line.pop_back();
  }
  return line;
}

void format_value(std::ostream& os, double v) {
  if (std::isnan(v)) {
    os << "NA";
    return;
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  os.write(buf, res.ptr - buf);
}

}  // namespace

std::vector<double> read_column_csv(const std::filesystem::path& path,
                                    const std::string& column) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("empty file: " + path.string());
  }
  if (trim_cr(line) != column) {
    throw std::invalid_argument("expected header '" + column + "' in " +
                                path.string());
  }
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim_cr(line);
    if (line.empty()) {
      continue;
    }
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc() || res.ptr != line.data() + line.size()) {
      throw std::invalid_argument("malformed CSV row at line " +
                                  std::to_string(lineno) + " of " +
                                  path.string());
    }
    values.push_back(v);
  }
  if (values.empty()) {
    throw std::invalid_argument("no data rows in " + path.string());
  }
  return values;
}

void write_column_csv(const std::filesystem::path& path,
                      const std::string& column,
                      std::span<const double> values) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  out << column << "\n";
  for (const double v : values) {
    format_value(out, v);
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

void write_pairs_csv(const std::filesystem::path& path,
                     const std::string& col_a, const std::string& col_b,
                     std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("write_pairs_csv: column length mismatch");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  out << col_a << "," << col_b << "\n";
  for (std::size_t i = 0; i < a.size(); ++i) {
    format_value(out, a[i]);
    out << ",";
    format_value(out, b[i]);
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(std::span<const std::string> chunks) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const std::string& chunk : chunks) {
    for (const unsigned char c : chunk) {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
    h ^= 0xFF;  // chunk separator
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

NoiseSpecArg parse_noise_spec(const std::string& text) {
  NoiseSpecArg spec;
  if (text.rfind("gamma:", 0) == 0) {
    spec.is_gamma = true;
    const std::string params = text.substr(6);
    const auto comma = params.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument(
          "--noise gamma spec must be gamma:k,theta");
    }
    try {
      spec.k = std::stod(params.substr(0, comma));
      spec.theta = std::stod(params.substr(comma + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("--noise gamma parameters must be numeric");
    }
    if (!(spec.k > 0.0) || !(spec.theta > 0.0)) {
      throw std::invalid_argument("--noise gamma parameters must be > 0");
    }
    return spec;
  }
  if (text.rfind("calib:", 0) == 0) {
    spec.is_gamma = false;
    spec.calibration_file = text.substr(6);
    if (spec.calibration_file.empty()) {
      throw std::invalid_argument("--noise calib spec needs a file path");
    }
    return spec;
  }
  throw std::invalid_argument(
      "--noise must be gamma:k,theta or calib:file.csv");
}

LoadedNoise load_noise(const NoiseSpecArg& spec,
                       std::optional<double> kde_bandwidth, double nu) {
  if (spec.is_gamma) {
    std::ostringstream desc;
    desc << "gamma(k=" << spec.k << ", theta=" << spec.theta << ")";
    return LoadedNoise{NoiseModel::gamma(spec.k, spec.theta), "", desc.str()};
  }
  std::string bytes = read_file_bytes(spec.calibration_file);
  std::vector<double> calibration =
      read_column_csv(spec.calibration_file, "u");
  const double bandwidth =
      kde_bandwidth.value_or(default_bandwidth(calibration));
  std::ostringstream desc;
  desc << "kde(calibration=" << spec.calibration_file.string()
       << ", m=" << calibration.size() << ", bandwidth=" << bandwidth
       << ", nu=" << nu << ")";
  return LoadedNoise{NoiseModel::kde(std::move(calibration), bandwidth, nu),
                     std::move(bytes), desc.str()};
}

McStudyConfig parse_study_config(const json& doc) {
  static const char* known[] = {"dataset", "gammas",  "ns",    "replications",
                                "p",       "seed",    "f_mode", "s_max",
                                "beta",    "eps",     "a",      "quad_points",
                                "threads"};
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::invalid_argument("study config: unknown key '" + key + "'");
    }
  }
  McStudyConfig config;
  config.dataset = doc.value("dataset", 1);
  if (config.dataset != 1 && config.dataset != 2) {
    throw std::invalid_argument("study config: dataset must be 1 or 2");
  }
  if (!doc.contains("gammas") || !doc.contains("ns")) {
    throw std::invalid_argument("study config: gammas and ns are required");
  }
  config.gammas = doc.at("gammas").get<std::vector<double>>();
  config.ns = doc.at("ns").get<std::vector<long>>();
  for (const double g : config.gammas) {
    if (!(g > 0.0)) {
      throw std::invalid_argument("study config: gammas must be > 0");
    }
  }
  for (const long n : config.ns) {
    if (n < 8) {
      throw std::invalid_argument("study config: every n must be >= 8");
    }
  }
  config.replications = doc.value("replications", 100);
  if (config.replications < 1) {
    throw std::invalid_argument("study config: replications must be >= 1");
  }
  config.p = doc.value("p", 0.6);
  if (!(config.p >= 0.0) || !(config.p <= 1.0)) {
    throw std::invalid_argument("study config: p must lie in [0, 1]");
  }
  config.seed = doc.value("seed", std::uint64_t{1});
  const std::string mode = doc.value("f_mode", "off");
  if (mode == "off") {
    config.f_mode = FErrorMode::off;
  } else if (mode == "adaptive") {
    config.f_mode = FErrorMode::adaptive;
  } else if (mode == "known_p") {
    config.f_mode = FErrorMode::known_p;
  } else {
    throw std::invalid_argument(
        "study config: f_mode must be off, adaptive or known_p");
  }
  config.est.s_max = doc.value("s_max", 8.0);
  if (doc.contains("beta")) {
    config.est.beta = doc.at("beta").get<double>();
  }
  if (doc.contains("eps")) {
    config.est.eps = doc.at("eps").get<double>();
  }
  config.est.a = doc.value("a", 1.0);
  config.est.quad_points = doc.value("quad_points", kDefaultQuadPoints);
  if (config.est.quad_points < 9 || config.est.quad_points % 2 == 0) {
    throw std::invalid_argument(
        "study config: quad_points must be odd and >= 9");
  }
  config.threads = doc.value("threads", 0);
  return config;
}

void write_mc_csv(const std::filesystem::path& path,
                  std::span<const McResultRow> rows) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  out << "dataset,gamma,n,replications,mse_p,mean_l2_f,slope\n";
  for (const McResultRow& row : rows) {
    out << row.dataset << ",";
    format_value(out, row.gamma);
    out << "," << row.n << "," << row.replications << ",";
    if (std::isnan(row.mse_p)) {
      out << "";
    } else {
      format_value(out, row.mse_p);
    }
    out << ",";
    if (std::isnan(row.mean_l2_f)) {
      out << "";
    } else {
      format_value(out, row.mean_l2_f);
    }
    out << ",";
    if (std::isnan(row.slope)) {
      out << "";
    } else {
      format_value(out, row.slope);
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

json result_document(const std::string& command, const std::string& digest,
                     double timing_ms, const json& settings,
                     const json& estimate,
                     const std::vector<std::string>& warnings) {
  json doc;
  doc["schema_version"] = "1";
  doc["command"] = command;
  doc["inputs_digest"] = digest;
  doc["timing_ms"] = timing_ms;
  doc["settings"] = settings;
  doc["estimate"] = estimate;
  doc["warnings"] = warnings;
  return doc;
}

}  // namespace atomdeconv::cli
