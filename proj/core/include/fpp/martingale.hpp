#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpp/passage.hpp"
#include "fpp/tau.hpp"
#include "fpp/weights.hpp"

namespace fpp {

struct MartingaleParams {
  TauParams tau;
  BoxGeometry geometry;
  int replicas = 64;     // inner resamples R per conditional estimate
  unsigned threads = 1;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t frozen_vertices = 0;
};

/// Vertices whose incident t-values are held fixed when conditioning on the
/// ball B(k): everything within max(theta, locality radius) + 1 of
/// B(k) and its outer boundary. Empty for k < 0.
///
/// Throws PreconditionError when the set reaches the window face.
VertexSet frozen_region(const TauField& tf, const VertexSet& source, int k);

/// Mean of T_tau(D(0), D(n e_1)) over R replicas that keep t fixed on the
/// frozen region of B(k) and redraw every other edge. Replica r advances the
/// resample round by r + 1, so estimates for different k share their draws.
Estimate conditional_mean(const WeightField& field, int k, const MartingaleParams& params);

struct MartingaleTrace {
  std::uint64_t seed = 0;
  double t_tau = 0.0;              // T_tau of the base configuration
  std::optional<int> k_star;
  std::vector<int> ks;             // -1 .. k_max
  std::vector<Estimate> estimates; // aligned with ks
  std::vector<double> differences; // estimates[i + 1].mean - estimates[i].mean
  double grand_mean = 0.0;         // the k = -1 estimate
  double telescoping_residual = 0.0;
  std::optional<double> terminal_residual;  // |m_{k_max} - T_tau| when k_max >= k*
  bool nested = true;              // frozen regions grow with k
  double max_abs_difference = 0.0;
  double shape_constant = 0.0;     // max |difference| / (ln n)^(2 + 2 delta)
};

MartingaleTrace martingale_trace(const WeightField& field, int k_max, const MartingaleParams& params);

/// Mean of T_tau over N fresh configurations (independent of any base field).
Estimate grand_mean(const DistributionSpec& dist, const MartingaleParams& params, std::size_t N,
                    std::uint64_t seed);

/// 2 exp(-x^2 / (2 k_count c^2)).
std::vector<double> azuma_curve(double diff_bound, int k_count, const std::vector<double>& x_grid);

}  // namespace fpp
