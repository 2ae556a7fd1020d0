#pragma once

// Experiment orchestration: empirical Kolmogorov distances, rate fits,
// configuration parsing and the JSON-lines result records behind the CLI.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trinorm/sampler.hpp"

namespace trinorm {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kOutDirEnv = "TRINORM_OUT_DIR";

struct DkEstimate {
  double dk = 0.0;
  double dkw_band = 0.0;  // sqrt(ln(2/delta) / (2m))
  std::uint64_t samples = 0;
};

// sup_x |F_m(x) - Phi(x)| of the empirical law against the standard normal.
DkEstimate empirical_dk(std::span<const double> w_samples, double delta = 0.01);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares of ln dk on ln n.
RateFit rate_fit(std::span<const std::pair<double, double>> points);

// Standardised triangle counts of `samples` G(n,p) graphs, split into
// `streams` contiguous index ranges run concurrently. The values do not
// depend on the number of streams.
std::vector<double> sample_w(int n, double p, std::uint64_t samples, std::uint64_t seed,
                             unsigned streams = 1);

// Standardised proxy values (Y - EY) / sd(Y) under the chosen model.
std::vector<double> sample_proxy_w(int n, double p, std::uint64_t samples, std::uint64_t seed,
                                   ProxyVariant variant, unsigned streams = 1);

struct PRule {
  enum class Kind { Fixed, Power };
  Kind kind = Kind::Fixed;
  double value = 0.5;  // fixed
  double c = 1.0;      // power: p = c n^{-alpha}
  double alpha = 0.5;

  // "fixed:0.5", "0.5", "power:0.6" (c = 1) or "power:2,0.6".
  static PRule parse(const std::string& text);
  // Throws ConfigError when the rule leaves (0,1) or, for power rules,
  // when n p < 4.
  double at(int n) const;
  std::string str() const;
};

struct ExperimentConfig {
  std::string subcommand;
  std::vector<int> n_list;
  PRule p_rule;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  unsigned streams = 1;
  std::vector<double> t_grid;  // empty: subcommand default
  std::string output;          // empty: stdout
  std::string csv;
  double delta = 0.01;
  std::string anchor = "r411";
  std::string mode = "exact";
  double t = 1.0;
  std::string input;
  std::string quantity = "dk";
  std::string policy = "estimate";
  std::string proxy_variant = "literal";

  nlohmann::ordered_json to_json() const;
  void validate() const;  // throws ConfigError
};

// Settings use the long flag names ("n", "p", "samples", "t-grid", ...).
using Settings = std::map<std::string, std::string>;

// key = value lines, '#' comments, blank lines ignored.
Settings read_config_file(const std::string& path);

// Later maps win over earlier ones.
ExperimentConfig make_config(const std::string& subcommand, const Settings& settings);

struct ResultRecord {
  nlohmann::ordered_json config;
  std::string quantity;
  std::optional<int> n;
  std::optional<double> p;
  double value = 0.0;
  std::optional<double> std_error;
  std::string regime;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  std::string timestamp;
  std::string tool_version = kToolVersion;

  nlohmann::ordered_json to_json() const;
  static ResultRecord from_json(const nlohmann::ordered_json& j);
  // FNV-1a of the serialised record without its timestamp.
  std::uint64_t content_hash() const;
};

struct RunOutput {
  std::vector<ResultRecord> records;
  std::vector<std::vector<std::string>> csv;  // header row first, if any
  std::uint64_t content_hash = 0;             // over all records, in order
};

RunOutput run(const ExperimentConfig& cfg);

// Appends records (and the CSV mirror) to the configured destinations.
void write_output(const ExperimentConfig& cfg, const RunOutput& out);

std::string hex64(std::uint64_t x);

}  // namespace trinorm
