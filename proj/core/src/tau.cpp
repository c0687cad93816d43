#include "fpp/tau.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "fpp/clusters.hpp"
#include "fpp/errors.hpp"

namespace fpp {

void TauParams::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(M > 0.0)) throw ConfigError("M must be positive");
  if (!(epsilon < M)) throw ConfigError("epsilon must be smaller than M");
  if (n < 2) throw ConfigError("n must be at least 2");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
}

double TauParams::threshold() const { return tau_threshold(n, delta); }

double tau_threshold(long n, double delta) {
  if (n < 2) throw DomainError("threshold requires n >= 2");
  return std::pow(std::log(static_cast<double>(n)), 1.0 + delta);
}

double locality_radius(double threshold, int dim) {
  return std::max(0.0, std::floor(threshold) - 1.0) * std::sqrt(static_cast<double>(dim));
}

double edge_distance(const Region& region, EdgeId a, EdgeId b) {
  const auto [a0, a1] = region.endpoints(a);
  const auto [b0, b1] = region.endpoints(b);
  const int d = region.dim();
  double best = std::numeric_limits<double>::infinity();
  for (VertexId u : {a0, a1}) {
    const Coord cu = region.coords(u);
    for (VertexId v : {b0, b1}) best = std::min(best, euclidean_distance(cu, region.coords(v), d));
  }
  return best;
}

std::string_view to_string(TauRule rule) {
  switch (rule) {
    case TauRule::Mid: return "mid";
    case TauRule::SmallKept: return "small_kept";
    case TauRule::SmallCapped: return "small_capped";
    case TauRule::LargeKept: return "large_kept";
    case TauRule::LargeCapped: return "large_capped";
  }
  return "?";
}

TauField::TauField(Region region, std::vector<double> tau, std::vector<TauRule> rules, TauParams params)
    : region_(std::move(region)), tau_(std::move(tau)), rules_(std::move(rules)), params_(params) {
  if (tau_.size() != region_.num_edges() || rules_.size() != region_.num_edges()) {
    throw DomainError("tau field does not match region edges");
  }
}

std::size_t TauField::count(TauRule rule) const noexcept {
  return static_cast<std::size_t>(std::count(rules_.begin(), rules_.end(), rule));
}

bool TauField::identical_to_weights() const noexcept {
  return std::none_of(rules_.begin(), rules_.end(),
                      [](TauRule r) { return r == TauRule::SmallCapped || r == TauRule::LargeCapped; });
}

namespace {

// An endpoint qualifies if it, or an L^d neighbour, belongs to a big cluster.
bool touches_big(const Region& r, const ClusterReport& open, const std::vector<std::uint8_t>& big, VertexId v,
                 std::int32_t& which) {
  auto check = [&](VertexId u) {
    const auto l = open.label(u);
    if (l != ClusterReport::kNone && big[l]) {
      which = l;
      return true;
    }
    return false;
  };
  if (check(v)) return true;
  bool found = false;
  r.for_each_ld_neighbor(v, [&](VertexId u) {
    if (!found) found = check(u);
  });
  return found;
}

}  // namespace

TauField tau_transform(const WeightField& field, const TauParams& params) {
  params.validate();
  const Region& r = field.region();
  const double theta = params.threshold();
  const ClusterReport small = epsilon_clusters(field, params.epsilon);
  const ClusterReport open = open_ld_clusters(field, params.M);
  std::vector<std::uint8_t> big(open.num_clusters(), 0);
  for (auto l : open.larger_than(theta)) big[l] = 1;

  const std::size_t ne = r.num_edges();
  std::vector<double> tau(ne);
  std::vector<TauRule> rules(ne);
  for (std::size_t i = 0; i < ne; ++i) {
    const auto e = static_cast<EdgeId>(i);
    const double t = field[e];
    const auto [a, b] = r.endpoints(e);
    if (t < params.epsilon) {
      const bool capped = static_cast<double>(small.cluster_size_at(a)) > theta;
      rules[i] = capped ? TauRule::SmallCapped : TauRule::SmallKept;
      tau[i] = capped ? 1.0 : t;
    } else if (t > params.M) {
      std::int32_t ca = ClusterReport::kNone, cb = ClusterReport::kNone;
      const bool capped = touches_big(r, open, big, a, ca) && touches_big(r, open, big, b, cb) && ca == cb;
      rules[i] = capped ? TauRule::LargeCapped : TauRule::LargeKept;
      tau[i] = capped ? 1.0 : t;
    } else {
      rules[i] = TauRule::Mid;
      tau[i] = t;
    }
  }
  return TauField(r, std::move(tau), std::move(rules), params);
}

namespace {

bool vertex_open(const WeightField& field, VertexId v, double M) {
  bool open = false;
  field.region().for_each_zd_neighbor(v, [&](VertexId, EdgeId e) { open = open || field[e] > M; });
  return open;
}

// Breadth-first growth from the two endpoints; true once more than `limit`
// vertices have been reached.
template <class Expand>
bool grows_beyond(VertexId a, VertexId b, double limit, Expand&& expand) {
  std::vector<VertexId> seen{a, b};
  std::deque<VertexId> queue{a, b};
  auto visited = [&](VertexId u) { return std::find(seen.begin(), seen.end(), u) != seen.end(); };
  while (!queue.empty()) {
    if (static_cast<double>(seen.size()) > limit) return true;
    const VertexId v = queue.front();
    queue.pop_front();
    expand(v, [&](VertexId u) {
      if (!visited(u)) {
        seen.push_back(u);
        queue.push_back(u);
      }
    });
  }
  return static_cast<double>(seen.size()) > limit;
}

}  // namespace

std::pair<double, TauRule> tau_of_edge(const WeightField& field, EdgeId e, const TauParams& params) {
  params.validate();
  const Region& r = field.region();
  const double theta = params.threshold();
  const double t = field[e];
  const auto [a, b] = r.endpoints(e);
  if (t < params.epsilon) {
    const bool capped = grows_beyond(a, b, theta, [&](VertexId v, auto&& push) {
      r.for_each_zd_neighbor(v, [&](VertexId u, EdgeId f) {
        if (field[f] < params.epsilon) push(u);
      });
    });
    return capped ? std::pair{1.0, TauRule::SmallCapped} : std::pair{t, TauRule::SmallKept};
  }
  if (t > params.M) {
    // Both endpoints are open and L^d-adjacent, so they share one cluster;
    // any big cluster they touch is that one.
    const bool capped = grows_beyond(a, b, theta, [&](VertexId v, auto&& push) {
      r.for_each_ld_neighbor(v, [&](VertexId u) {
        if (vertex_open(field, u, params.M)) push(u);
      });
    });
    return capped ? std::pair{1.0, TauRule::LargeCapped} : std::pair{t, TauRule::LargeKept};
  }
  return {t, TauRule::Mid};
}

LocalityResult tau_locality_check(const WeightField& field, EdgeId e, const TauParams& params, double radius,
                                  int rounds) {
  params.validate();
  if (rounds < 1) throw DomainError("locality check needs at least one round");
  const Region& r = field.region();
  const double reach = std::max(radius, locality_radius(params.threshold(), r.dim()));
  const int need = static_cast<int>(std::ceil(reach)) + 2;
  const auto [a, b] = r.endpoints(e);
  if (r.face_margin(a) < need || r.face_margin(b) < need) {
    throw PreconditionError("edge too close to the window face for a locality check");
  }
  std::vector<std::uint8_t> near(r.num_edges(), 0);
  LocalityResult res;
  for (std::size_t f = 0; f < r.num_edges(); ++f) {
    near[f] = edge_distance(r, e, static_cast<EdgeId>(f)) <= radius;
    if (!near[f]) ++res.resampled_edges;
  }
  const auto reference = tau_of_edge(field, e, params);
  for (int k = 1; k <= rounds; ++k) {
    const WeightField other =
        resample_edges(field, [&](EdgeId f) { return near[f] != 0; }, static_cast<std::uint32_t>(k));
    ++res.rounds;
    if (tau_of_edge(other, e, params) != reference) {
      res.holds = false;
      res.first_change = k;
      break;
    }
  }
  return res;
}

}  // namespace fpp
