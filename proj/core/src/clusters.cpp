#include "fpp/clusters.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "fpp/errors.hpp"

namespace fpp {

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), 0U);
}

std::uint32_t DisjointSets::find(std::uint32_t x) noexcept {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSets::unite(std::uint32_t a, std::uint32_t b) noexcept {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

ClusterReport::ClusterReport(Region region, Adjacency adjacency, std::vector<std::int32_t> labels)
    : region_(std::move(region)), adjacency_(adjacency), labels_(std::move(labels)) {
  if (labels_.size() != region_.num_vertices()) throw DomainError("label vector does not match region");
  for (std::int32_t l : labels_) {
    if (l == kNone) continue;
    if (l < 0) throw DomainError("negative cluster label");
    if (static_cast<std::size_t>(l) >= sizes_.size()) sizes_.resize(l + 1, 0);
    ++sizes_[l];
  }
}

std::size_t ClusterReport::cluster_size_at(VertexId v) const noexcept {
  const auto l = labels_[v];
  return l == kNone ? 0 : sizes_[l];
}

VertexSet ClusterReport::members(std::int32_t label) const {
  VertexSet s(region_);
  for (std::size_t v = 0; v < labels_.size(); ++v) {
    if (labels_[v] == label) s.insert(static_cast<VertexId>(v));
  }
  return s;
}

std::vector<std::int32_t> ClusterReport::larger_than(double threshold) const {
  std::vector<std::int32_t> out;
  for (std::size_t l = 0; l < sizes_.size(); ++l) {
    if (static_cast<double>(sizes_[l]) > threshold) out.push_back(static_cast<std::int32_t>(l));
  }
  return out;
}

namespace {

// Dense labels from union-find roots, numbered by first appearance.
std::vector<std::int32_t> relabel(DisjointSets& ds, const std::vector<std::uint8_t>& member) {
  std::vector<std::int32_t> root_label(member.size(), ClusterReport::kNone);
  std::vector<std::int32_t> labels(member.size(), ClusterReport::kNone);
  std::int32_t next = 0;
  for (std::size_t v = 0; v < member.size(); ++v) {
    if (!member[v]) continue;
    const auto r = ds.find(static_cast<std::uint32_t>(v));
    if (root_label[r] == ClusterReport::kNone) root_label[r] = next++;
    labels[v] = root_label[r];
  }
  return labels;
}

}  // namespace

ClusterReport epsilon_clusters(const WeightField& field, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const Region& r = field.region();
  DisjointSets ds(r.num_vertices());
  std::vector<std::uint8_t> member(r.num_vertices(), 0);
  for (std::size_t e = 0; e < r.num_edges(); ++e) {
    if (field[static_cast<EdgeId>(e)] < epsilon) {
      const auto [a, b] = r.endpoints(static_cast<EdgeId>(e));
      member[a] = member[b] = 1;
      ds.unite(a, b);
    }
  }
  return ClusterReport(r, Adjacency::Zd, relabel(ds, member));
}

VertexSet open_vertices(const WeightField& field, double M) {
  if (!(M > 0.0)) throw DomainError("M must be positive");
  const Region& r = field.region();
  VertexSet open(r);
  for (std::size_t e = 0; e < r.num_edges(); ++e) {
    if (field[static_cast<EdgeId>(e)] > M) {
      const auto [a, b] = r.endpoints(static_cast<EdgeId>(e));
      open.insert(a);
      open.insert(b);
    }
  }
  return open;
}

ClusterReport open_ld_clusters(const WeightField& field, double M) {
  const VertexSet open = open_vertices(field, M);
  const Region& r = field.region();
  DisjointSets ds(r.num_vertices());
  std::vector<std::uint8_t> member(open.mask().begin(), open.mask().end());
  for (std::size_t v = 0; v < member.size(); ++v) {
    if (!member[v]) continue;
    r.for_each_ld_neighbor(static_cast<VertexId>(v), [&](VertexId u) {
      if (u > v && member[u]) ds.unite(static_cast<std::uint32_t>(v), u);
    });
  }
  return ClusterReport(r, Adjacency::Ld, relabel(ds, member));
}

std::vector<VertexId> lemma1_bypass(const VertexSet& cluster, const WeightField& field, double M, VertexId x,
                                    VertexId y) {
  if (!(cluster.region() == field.region())) throw DomainError("cluster and field live on different regions");
  if (cluster.empty()) throw DomainError("cluster must be nonempty");
  const VertexSet delta = exterior_boundary(cluster);
  if (!delta.contains(x) || !delta.contains(y)) {
    throw PreconditionError("bypass endpoints must lie in the exterior boundary of the cluster");
  }
  if (x == y) return {x};
  const Region& r = field.region();
  const VertexSet outside = reachable_from_faces(cluster);
  std::vector<VertexId> pred(r.num_vertices(), kNoVertex);
  std::deque<VertexId> queue{x};
  pred[x] = x;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    if (v == y) break;
    r.for_each_zd_neighbor(v, [&](VertexId u, EdgeId e) {
      if (pred[u] == kNoVertex && outside.contains(u) && field[e] <= M) {
        pred[u] = v;
        queue.push_back(u);
      }
    });
  }
  if (pred[y] == kNoVertex) throw WindowTooSmallError("no bypass path with edges <= M inside the window");
  std::vector<VertexId> path{y};
  while (path.back() != x) path.push_back(pred[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

double path_max_edge(const WeightField& field, std::span<const VertexId> path) {
  double m = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto e = field.region().find_edge(path[i - 1], path[i]);
    if (!e) throw DomainError("consecutive path vertices are not adjacent");
    m = std::max(m, field[*e]);
  }
  return m;
}

SizeTail cluster_size_tail(const std::vector<std::size_t>& sizes, std::size_t max_size) {
  SizeTail t;
  if (sizes.empty()) return t;
  std::vector<std::size_t> count(max_size + 2, 0);
  for (std::size_t s : sizes) ++count[std::min(s, max_size + 1)];
  std::size_t at_least = sizes.size();
  for (std::size_t m = 0; m <= max_size; ++m) {
    if (m >= 1) {
      t.m.push_back(m);
      t.p.push_back(static_cast<double>(at_least) / static_cast<double>(sizes.size()));
    }
    at_least -= count[m];
  }
  return t;
}

}  // namespace fpp
