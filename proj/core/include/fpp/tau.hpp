#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/weights.hpp"

namespace fpp {

struct TauParams {
  double epsilon = 0.05;
  double M = 6.0;
  long n = 32;
  double delta = 0.25;

  /// Throws ConfigError unless 0 < epsilon < M, n >= 2, delta in (0, 1).
  void validate() const;
  /// Cluster-size threshold (ln n)^(1+delta).
  double threshold() const;
};

/// (ln n)^(1+delta).
double tau_threshold(long n, double delta);

/// Distance beyond which t-values cannot influence tau(e):
/// (floor(threshold) - 1) * sqrt(d), floored at 0. Distances between edges are
/// taken between their nearest endpoints.
double locality_radius(double threshold, int dim);

/// Euclidean distance between the nearest endpoints of two edges.
double edge_distance(const Region& region, EdgeId a, EdgeId b);

enum class TauRule : std::uint8_t { Mid, SmallKept, SmallCapped, LargeKept, LargeCapped };

std::string_view to_string(TauRule rule);

class TauField {
 public:
  TauField(Region region, std::vector<double> tau, std::vector<TauRule> rules, TauParams params);

  const Region& region() const noexcept { return region_; }
  std::span<const double> values() const noexcept { return tau_; }
  double operator[](EdgeId e) const noexcept { return tau_[e]; }
  TauRule rule(EdgeId e) const noexcept { return rules_[e]; }
  std::span<const TauRule> rules() const noexcept { return rules_; }
  const TauParams& params() const noexcept { return params_; }
  std::size_t count(TauRule rule) const noexcept;
  /// True when no edge was capped.
  bool identical_to_weights() const noexcept;

 private:
  Region region_;
  std::vector<double> tau_;
  std::vector<TauRule> rules_;
  TauParams params_;
};

TauField tau_transform(const WeightField& field, const TauParams& params);

/// tau(e) and its rule computed by exploring only the clusters around e.
/// Agrees with tau_transform(field, params)[e] on every edge.
std::pair<double, TauRule> tau_of_edge(const WeightField& field, EdgeId e, const TauParams& params);

struct LocalityResult {
  bool holds = true;
  int rounds = 0;
  int first_change = -1;  // round at which tau(e) changed, -1 if never
  std::size_t resampled_edges = 0;
};

/// Redraws every edge farther than `radius` from e, `rounds` independent
/// times, and reports whether tau(e) ever changed.
///
/// Throws PreconditionError unless both endpoints of e keep a face margin of
/// at least ceil(max(radius, locality_radius)) + 2.
LocalityResult tau_locality_check(const WeightField& field, EdgeId e, const TauParams& params, double radius,
                                  int rounds = 20);

}  // namespace fpp
