#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpp/numeric.hpp"
#include "fpp/passage.hpp"
#include "fpp/tau.hpp"
#include "fpp/weights.hpp"

namespace fpp {

enum class Quantity { A0n, B0n, S0n, Phi, TBox, TTauBox };

std::string_view to_string(Quantity q);
/// Accepts a0n, b0n, s0n, phi, T_box, T_tau_box; throws ConfigError otherwise.
Quantity parse_quantity(std::string_view name);

struct EnsembleParams {
  int dim = 2;
  TauParams tau;                 // n is replaced by each entry of the n list
  int transverse = -1;           // W_perp; negative means 4n
  double pad_factor = 1.0;       // longitudinal padding ceil(pad_factor * n)
  int box_half_width = -1;       // negative means ceil(3^d M (ln n)^(1+delta))
  int face_half_width = -1;      // negative means face_cube_half_width(n, delta)
  int max_moment_order = 4;      // central moments up to 2 * max_moment_order
  std::size_t max_vertices = 50'000'000;
  unsigned threads = 1;

  int transverse_for(long n) const;
  int pad_for(long n) const;
  int box_half_width_for(long n) const;
  int face_half_width_for(long n) const;
  Region window_for(long n) const;
};

struct Replica {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
  std::size_t path_len = 0;
  double max_edge = 0.0;
  bool tau_mismatch = false;  // T_box only: T differs from T_tau by more than 1e-9
};

struct RateEstimate {
  long n = 0;
  std::size_t N = 0;
  std::size_t events = 0;
  double rate = 0.0;
  Interval ci;
};

struct ReplicaStats {
  Quantity quantity = Quantity::A0n;
  long n = 0;
  std::size_t N = 0;
  double mean = 0.0;
  double var = 0.0;                     // unbiased
  std::vector<double> central_moments;  // index p holds the p-th central moment
  std::vector<Replica> replicas;        // ordered by replica index
  std::optional<RateEstimate> tau_mismatch;

  std::vector<double> values() const;
  double std_error() const;
};

/// Seed of replica i at scale n.
std::uint64_t replica_seed(std::uint64_t master, long n, std::size_t replica);

/// Summary statistics of a sample with compensated accumulation.
ReplicaStats summarize(Quantity q, long n, std::vector<Replica> replicas, int max_moment_order);

/// Evaluates one quantity on one configuration.
Replica evaluate(Quantity q, const WeightField& field, long n, const EnsembleParams& params);

/// N independent replicas per n. Deterministic in (quantity, n, N, dist,
/// params, seed) regardless of the thread count.
std::vector<ReplicaStats> run_ensemble(Quantity q, const std::vector<long>& n_list, std::size_t N,
                                       const DistributionSpec& dist, const EnsembleParams& params,
                                       std::uint64_t seed);

struct TailPoint {
  double x = 0.0;
  double p = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

/// P[|X - mean| >= x sqrt(n)] with Wilson intervals.
std::vector<TailPoint> tail_profile(const ReplicaStats& stats, const std::vector<double>& x_grid);

struct TailShape {
  std::size_t points = 0;     // grid points with at least 10 exceedances
  bool decreasing = false;
  double slope = 0.0;         // of log p against x^2
  Interval slope_ci;
  double max_second_difference = 0.0;  // of log p against x^2 (concave if <= 0)
};

TailShape tail_shape(const std::vector<TailPoint>& tail, std::size_t N);

struct FitReport {
  std::string model;
  std::map<std::string, double> params;
  std::map<std::string, Interval> ci;
  std::vector<double> x, y, residuals;
  double r2 = 0.0;
  bool degenerate = false;
  bool consistent = false;
  std::vector<std::string> notes;
};

/// log var = log c + gamma log n; consistent iff the upper 95% limit of gamma
/// is below 1.
FitReport variance_scaling(const std::vector<ReplicaStats>& stats);

/// log E|X - mean|^(2m) against log n; consistent iff the slope's lower 95%
/// limit stays under m + 10 m ln ln n / ln n at the largest n.
FitReport moment_growth(const std::vector<ReplicaStats>& stats, int m);

struct TimeConstantReport {
  double mu_upper = 0.0;      // min over n of mean / n
  double allowance = 0.0;
  double mu_hat = 0.0;
  std::vector<long> n;
  std::vector<double> mean, std_error, gap;
  bool lower_bound_exact = false;   // n mu_hat <= mean(n) for all n
  bool gap_nonnegative = false;     // gap >= -3 stderr for all n
  bool trend_ok = false;            // decreasing trend of gap not significant at 95%
  LinearFit trend;
  ProportionalFit shape;            // gap ~ c sqrt(n) (ln n)^4
  std::vector<std::string> warnings;
};

/// Time constant estimate from point-to-point means. When face-face means at
/// the same n are supplied, max_n mean_phi / n serves as a lower estimate and
/// the allowance is the distance between the two.
TimeConstantReport time_constant(const std::vector<ReplicaStats>& point_stats,
                                 const std::vector<ReplicaStats>& face_stats = {});

/// Fraction of replicas with T(D(0), D(n e_1)) != T_tau(...).
RateEstimate tau_equality_rate(const DistributionSpec& dist, const EnsembleParams& params, long n, std::size_t N,
                               std::uint64_t seed);

struct CorrelationReport {
  std::size_t N = 0;
  double separation = 0.0;
  double rho = 0.0;
  double bound = 0.0;  // 3 / sqrt(N)
  bool within = false;
};

/// Pearson correlation of tau on two edges more than 2 theta_n apart, one pair
/// per independent configuration.
CorrelationReport distant_tau_correlation(const DistributionSpec& dist, const TauParams& tau, int dim,
                                          std::size_t N, std::uint64_t seed, unsigned threads = 1);

}  // namespace fpp
