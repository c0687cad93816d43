#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpp/passage.hpp"
#include "fpp/stats.hpp"
#include "fpp/tau.hpp"
#include "fpp/weights.hpp"

namespace fpp::cli {

struct ExperimentConfig {
  int dim = 2;
  std::vector<long> n_list{16, 32, 64};
  std::string quantity = "a0n";
  std::string dist = "exponential:rate=1";
  double epsilon = 0.05;
  double M = 6.0;
  double delta = 0.25;
  int transverse = -1;      // negative: 4n for run, max(64, 2n) for verify/martingale
  double pad_factor = 1.0;
  int box_half_width = 2;
  long replicas = 100;
  int inner_replicas = 64;
  int k_max = -1;           // martingale; negative runs each trace to k* + 2
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = ".";
  std::size_t max_vertices = 50'000'000;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  DistributionSpec distribution() const;
  Quantity parsed_quantity() const;
  TauParams tau(long n) const;
  EnsembleParams ensemble() const;
  /// Box geometry used by the verification suites and the martingale.
  BoxGeometry geometry(long n) const;
  int verify_margin(long n) const;

  nlohmann::json to_json() const;
};

/// Keys accepted in config files and as --flags (dashes and underscores are
/// interchangeable on the command line).
const std::vector<std::string>& config_keys();

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key = value` lines; `#` starts a comment.
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

/// FPP_THREADS when set, otherwise the hardware concurrency.
unsigned default_threads();

}  // namespace fpp::cli
