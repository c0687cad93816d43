#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpp/lattice.hpp"

namespace fpp {

/// Common edge passage-time distribution F.
///
/// bernoulli(a, b, p) puts mass p on the low value a and 1 - p on b, so that
/// F(a) = p is the fraction of fast edges.
class DistributionSpec {
 public:
  enum class Family { PointMass, Bernoulli, Uniform, Exponential, Pareto };

  static DistributionSpec point_mass(double c);
  static DistributionSpec bernoulli(double a, double b, double p);
  static DistributionSpec uniform(double lo, double hi);
  static DistributionSpec exponential(double rate);
  static DistributionSpec pareto(double alpha, double scale);

  /// Parses `family:key=value,...`, e.g. `pareto:alpha=2.5,scale=1`.
  static DistributionSpec parse(std::string_view text);
  std::string to_string() const;

  Family family() const noexcept { return family_; }

  double cdf(double x) const noexcept;          // P[t <= x]
  double cdf_below(double x) const noexcept;    // P[t < x]
  double tail_mass(double x) const noexcept;    // P[t >= x]
  double quantile(double u) const noexcept;     // inverse cdf on (0, 1)
  double mean() const noexcept;
  bool heavy_tail() const noexcept;             // pareto with alpha <= 2
  bool continuous() const noexcept;

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;

 private:
  DistributionSpec(Family f, double p0, double p1, double p2) : family_(f), p0_(p0), p1_(p1), p2_(p2) {}
  Family family_;
  double p0_, p1_, p2_;
};

/// P[t(e) >= x].
double tail_mass(const DistributionSpec& dist, double x);

/// Probability that a vertex is open: 1 - P[t < M]^(2d).
double p_open(const DistributionSpec& dist, double M, int dim);

/// One sampled configuration {t(e)} over a region.
///
/// Each weight is a pure function of (seed, global edge key, resample round,
/// distribution), realised with a keyed SipHash-2-4 counter PRF, so any single
/// edge can be re-derived bit-exactly.
class WeightField {
 public:
  /// Hand-built field with explicit weights (rounds all zero, no distribution).
  WeightField(Region region, std::vector<double> weights);

  const Region& region() const noexcept { return region_; }
  std::span<const double> values() const noexcept { return weights_; }
  double operator[](EdgeId e) const noexcept { return weights_[e]; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t round(EdgeId e) const noexcept { return rounds_[e]; }
  std::span<const std::uint32_t> rounds() const noexcept { return rounds_; }
  const std::optional<DistributionSpec>& distribution() const noexcept { return dist_; }

  /// Copy with one weight replaced.
  WeightField with_weight(EdgeId e, double w) const;

  friend WeightField sample_configuration(const Region&, const DistributionSpec&, std::uint64_t);
  friend WeightField resample_edges(const WeightField&, const std::function<bool(EdgeId)>&, std::uint32_t);

 private:
  WeightField(Region region, DistributionSpec dist, std::uint64_t seed);
  Region region_;
  std::optional<DistributionSpec> dist_;
  std::uint64_t seed_ = 0;
  std::vector<double> weights_;
  std::vector<std::uint32_t> rounds_;
};

/// The weight drawn for `edge` of `region` at the given round.
double draw_weight(const DistributionSpec& dist, std::uint64_t seed, const Region& region, EdgeId edge,
                   std::uint32_t round);

/// Uniform (0, 1) variate from the PRF keyed by seed; `words` is the counter.
double prf_uniform(std::uint64_t seed, std::span<const std::int32_t> words);

/// 64-bit PRF output keyed by seed over `words`.
std::uint64_t prf_u64(std::uint64_t seed, std::span<const std::int32_t> words);

/// Derived seed for stream (tag, a, b) of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint32_t tag, std::uint64_t a, std::uint64_t b = 0);

WeightField sample_configuration(const Region& region, const DistributionSpec& dist, std::uint64_t seed);

/// Redraw every edge for which keep(e) is false, advancing its round by
/// `advance`. Kept edges are unchanged bit-exactly.
WeightField resample_edges(const WeightField& field, const std::function<bool(EdgeId)>& keep,
                           std::uint32_t advance = 1);

/// Keep edges with both endpoints in keep ∪ ∂_o(keep); redraw all others.
WeightField resample_outside(const WeightField& field, const VertexSet& keep, std::uint32_t advance = 1);

}  // namespace fpp
