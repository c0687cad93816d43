#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpp/cli/config.hpp"
#include "fpp/martingale.hpp"
#include "fpp/stats.hpp"

namespace fpp::cli {

// ---------------------------------------------------------------------------
// run

struct RunOutput {
  std::vector<ReplicaStats> stats;
  std::filesystem::path csv, summary, plot;
};

/// Default tail grid: x = 0, 0.05, ..., 1.5.
std::vector<double> default_tail_grid();

std::string ensemble_csv(const std::vector<ReplicaStats>& stats);
nlohmann::json fit_json(const FitReport& fit);
nlohmann::json summary_json(const ExperimentConfig& cfg, const std::vector<ReplicaStats>& stats);
std::string plot_script(const ExperimentConfig& cfg, const std::vector<ReplicaStats>& stats);

/// Runs the ensemble and writes ensemble.csv, summary.json and plots.gp into
/// cfg.out (created if missing).
RunOutput run_experiment(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// martingale

struct DifferenceStats {
  int k = 0;
  std::size_t N = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double max_abs = 0.0;
};

struct MartingaleSummary {
  long n = 0;
  std::size_t N = 0;
  int R = 0;
  std::vector<MartingaleTrace> traces;
  /// Delta_k = m_{k+1} - m_k for k = -1 .. max k_max - 1. A trace that
  /// stops before k contributes 0, which is exact once B(k) holds the target.
  std::vector<DifferenceStats> per_k;
  double max_abs_difference = 0.0;
  double max_telescoping_residual = 0.0;
  double max_collapse_residual = 0.0;     // |Delta_k| over k >= k*
  double max_terminal_residual = 0.0;     // |m_k - T_tau| at k = k_max
  std::size_t collapse_checks = 0;
  bool all_nested = true;
};

/// One trace per base configuration, each run to cfg.k_max (or k* + 2 when
/// k_max is negative).
MartingaleSummary run_martingale(const ExperimentConfig& cfg, long n);

nlohmann::json martingale_json(const ExperimentConfig& cfg, const MartingaleSummary& s);
std::string martingale_csv(const MartingaleSummary& s);

// ---------------------------------------------------------------------------
// report

/// Markdown report over every summary.json and martingale.json below `dir`.
/// Throws ConfigError when nothing is found or a file does not parse.
std::string build_report(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------

/// Whole command line front end; returns the process exit status.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fpp::cli
