#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fpp/cli/config.hpp"

namespace fpp::cli {

struct CheckTally {
  std::string name;
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t skip = 0;
  std::vector<std::string> failures;  // first few, with the replica seed
};

struct SuiteReport {
  std::string suite;
  std::vector<long> n;
  std::size_t configurations = 0;
  std::vector<CheckTally> checks;

  std::size_t failures() const;
  bool all_skipped() const;
  bool passed() const { return failures() == 0; }
  /// 0 on success (including all-skip), 4 on any failure.
  int exit_code() const { return passed() ? 0 : 4; }
  const CheckTally& check(std::string_view name) const;
  std::string text() const;
};

const std::vector<std::string>& suite_names();

/// Runs the named suite over `replicas` configurations per n. Throws
/// ConfigError for an unknown suite.
SuiteReport verify_suite(std::string_view suite, const ExperimentConfig& cfg);

}  // namespace fpp::cli
