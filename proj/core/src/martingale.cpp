#include "fpp/martingale.hpp"

#include <algorithm>
#include <cmath>

#include "fpp/errors.hpp"
#include "fpp/numeric.hpp"
#include "fpp/parallel.hpp"

namespace fpp {

namespace {

Estimate summarize(const std::vector<double>& xs) {
  Estimate e;
  const double n = static_cast<double>(xs.size());
  e.mean = pairwise_sum(xs) / n;
  CompensatedSum ss;
  for (double x : xs) ss.add((x - e.mean) * (x - e.mean));
  e.std_error = xs.size() > 1 ? std::sqrt(ss.value() / (n - 1.0) / n) : 0.0;
  return e;
}

constexpr std::uint32_t kGrandMeanTag = 0x47524d4e;

}  // namespace

VertexSet frozen_region(const TauField& tf, const VertexSet& source, int k) {
  const Region& r = tf.region();
  VertexSet frozen(r);
  if (k < 0) return frozen;
  const VertexSet b = tau_ball(tf, source, k);
  VertexSet core = b;
  if (b.size() < r.num_vertices()) core = b.united(boundaries(b, Adjacency::Zd).outer);

  const double theta = tf.params().threshold();
  const double radius = std::max(theta, locality_radius(theta, r.dim())) + 1.0;
  const int reach = static_cast<int>(std::floor(radius));
  const int d = r.dim();
  std::vector<Coord> offsets;
  Coord o{};
  for (int a = 0; a < d; ++a) o[a] = -reach;
  while (true) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += static_cast<double>(o[a]) * o[a];
    if (std::sqrt(s) <= radius) offsets.push_back(o);
    int a = d - 1;
    while (a >= 0 && o[a] == reach) o[a--] = -reach;
    if (a < 0) break;
    ++o[a];
  }
  for (VertexId v : core.members()) {
    const Coord c = r.coords(v);
    for (const Coord& off : offsets) {
      Coord u = c;
      for (int a = 0; a < d; ++a) u[a] += off[a];
      if (!r.contains(u)) throw PreconditionError("frozen region around B(k) leaves the window");
      const VertexId id = r.index_unchecked(u);
      if (r.on_face(id)) throw PreconditionError("frozen region around B(k) reaches the window face");
      frozen.insert(id);
    }
  }
  return frozen;
}

Estimate conditional_mean(const WeightField& field, int k, const MartingaleParams& params) {
  if (params.replicas < 2) throw DomainError("conditional mean needs at least 2 replicas");
  params.tau.validate();
  const Region& r = field.region();
  const BoxPair boxes = params.geometry.boxes(r);
  const TauField tf = tau_transform(field, params.tau);
  const VertexSet frozen = frozen_region(tf, boxes.source, k);
  std::vector<double> values(static_cast<std::size_t>(params.replicas));
  parallel_for(values.size(), params.threads, [&](std::size_t i) {
    const WeightField replica = resample_outside(field, frozen, static_cast<std::uint32_t>(i + 1));
    values[i] = passage_time(tau_transform(replica, params.tau), boxes.source, boxes.target).time;
  });
  Estimate e = summarize(values);
  e.frozen_vertices = frozen.size();
  return e;
}

MartingaleTrace martingale_trace(const WeightField& field, int k_max, const MartingaleParams& params) {
  if (k_max < 0) throw DomainError("k_max must be nonnegative");
  const Region& r = field.region();
  const BoxPair boxes = params.geometry.boxes(r);
  const TauField tf = tau_transform(field, params.tau);
  MartingaleTrace tr;
  tr.seed = field.seed();
  const BallSequence seq = ball_growth(tf, boxes.source, boxes.target, k_max);
  tr.k_star = seq.k_star();
  tr.t_tau = passage_time(tf, boxes.source, boxes.target).time;

  std::optional<VertexSet> prev;
  for (int k = -1; k <= k_max; ++k) {
    const VertexSet frozen = frozen_region(tf, boxes.source, k);
    if (prev && !prev->subset_of(frozen)) tr.nested = false;
    prev = frozen;
    tr.ks.push_back(k);
    tr.estimates.push_back(conditional_mean(field, k, params));
  }
  tr.grand_mean = tr.estimates.front().mean;
  for (std::size_t i = 0; i + 1 < tr.estimates.size(); ++i) {
    tr.differences.push_back(tr.estimates[i + 1].mean - tr.estimates[i].mean);
    tr.max_abs_difference = std::max(tr.max_abs_difference, std::abs(tr.differences.back()));
  }
  tr.telescoping_residual =
      std::abs(pairwise_sum(tr.differences) - (tr.estimates.back().mean - tr.estimates.front().mean));
  if (tr.k_star && k_max >= *tr.k_star) tr.terminal_residual = std::abs(tr.estimates.back().mean - tr.t_tau);
  const double scale =
      std::pow(std::log(static_cast<double>(params.tau.n)), 2.0 + 2.0 * params.tau.delta);
  tr.shape_constant = tr.max_abs_difference / scale;
  return tr;
}

Estimate grand_mean(const DistributionSpec& dist, const MartingaleParams& params, std::size_t N,
                    std::uint64_t seed) {
  if (N < 2) throw DomainError("grand mean needs at least 2 configurations");
  const Region window = params.geometry.window();
  const BoxPair boxes = params.geometry.boxes(window);
  std::vector<double> values(N);
  parallel_for(N, params.threads, [&](std::size_t i) {
    const WeightField f = sample_configuration(window, dist, derive_seed(seed, kGrandMeanTag, i));
    values[i] = passage_time(tau_transform(f, params.tau), boxes.source, boxes.target).time;
  });
  return summarize(values);
}

std::vector<double> azuma_curve(double diff_bound, int k_count, const std::vector<double>& x_grid) {
  if (!(diff_bound > 0.0)) throw DomainError("difference bound must be positive");
  if (k_count < 1) throw DomainError("k_count must be positive");
  std::vector<double> out;
  out.reserve(x_grid.size());
  const double denom = 2.0 * k_count * diff_bound * diff_bound;
  for (double x : x_grid) out.push_back(2.0 * std::exp(-x * x / denom));
  return out;
}

}  // namespace fpp
