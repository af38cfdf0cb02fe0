#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ulab::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double orthonormality = 1e-10;
  double tail = 1e-6;
  double factorization = 1e-10;
  double resolvent_identity = 1e-8;
  double spacing_tv = 0.08;
  bool operator==(const Tolerances&) const = default;
};

struct SamplerConfig {
  std::vector<int> betas{1, 2};
  int n = 64;
  long samples = 10000;
  long burn_in = 100000;
  long thin = 0;  // 0: 2n proposals
  int chains = 1;
  double lambda0 = 0.0;
  double half_window = 1.0;
  bool operator==(const SamplerConfig&) const = default;
};

struct RunConfig {
  std::string command;
  std::vector<double> potential;  // coefficients of lambda^0, lambda^2, ...
  double d1 = 3.0;
  double d2 = 1.0;
  std::vector<int> n_list;
  std::vector<double> lambda0_list{0.0, 1.0};
  double s_lo = -2.0;
  double s_hi = 2.0;
  int s_points = 41;
  int panels = 0;
  int order = 12;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  std::optional<SamplerConfig> sampler;
  std::string output = "ulab-out";
  bool operator==(const RunConfig&) const = default;
};

// Throws ConfigError on missing required fields (potential, n_list), unknown keys or invalid values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);
void validate(const RunConfig& c);

// Everything that affects the numbers: to_json without the output directory.
nlohmann::json hashed_json(const RunConfig& c);

// SHA-256 of hashed_json, hex encoded.
std::string config_hash(const RunConfig& c);

}  // namespace ulab::cli
