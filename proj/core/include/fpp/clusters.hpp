#pragma once

#include <cstdint>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/weights.hpp"

namespace fpp {

/// Union-find with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::uint32_t find(std::uint32_t x) noexcept;
  bool unite(std::uint32_t a, std::uint32_t b) noexcept;
  std::uint32_t size_of(std::uint32_t x) noexcept { return size_[find(x)]; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

/// Connected-component labelling of a subset of the window's vertices.
///
/// Labels are dense in [0, num_clusters()) and numbered in order of each
/// cluster's smallest vertex index.
class ClusterReport {
 public:
  static constexpr std::int32_t kNone = -1;

  ClusterReport(Region region, Adjacency adjacency, std::vector<std::int32_t> labels);

  const Region& region() const noexcept { return region_; }
  Adjacency adjacency() const noexcept { return adjacency_; }
  std::int32_t label(VertexId v) const noexcept { return labels_[v]; }
  std::span<const std::int32_t> labels() const noexcept { return labels_; }
  std::size_t num_clusters() const noexcept { return sizes_.size(); }
  std::size_t size(std::int32_t label) const noexcept { return sizes_[label]; }
  std::span<const std::size_t> sizes() const noexcept { return sizes_; }
  /// Size of v's cluster, 0 when v is unlabelled.
  std::size_t cluster_size_at(VertexId v) const noexcept;

  VertexSet members(std::int32_t label) const;
  /// Labels of clusters with strictly more than `threshold` vertices.
  std::vector<std::int32_t> larger_than(double threshold) const;
  bool empty() const noexcept { return sizes_.empty(); }

 private:
  Region region_;
  Adjacency adjacency_;
  std::vector<std::int32_t> labels_;
  std::vector<std::size_t> sizes_;
};

/// Z^d components of the subgraph of edges with t(e) < epsilon. Vertices
/// without an incident such edge stay unlabelled.
ClusterReport epsilon_clusters(const WeightField& field, double epsilon);

/// Vertices with some incident edge t(e) > M.
VertexSet open_vertices(const WeightField& field, double M);

/// L^d components of the open vertices.
ClusterReport open_ld_clusters(const WeightField& field, double M);

/// Z^d path from x to y (vertex sequence) using only edges with t(e) <= M and
/// vertices outside `cluster` that connect to the window faces. The search is
/// breadth-first, so the path has the fewest possible edges.
///
/// Throws PreconditionError if the cluster touches a face or x, y are not in
/// its exterior boundary, WindowTooSmallError if no such path exists.
std::vector<VertexId> lemma1_bypass(const VertexSet& cluster, const WeightField& field, double M, VertexId x,
                                    VertexId y);

/// Largest edge weight along a vertex path of the field's region.
double path_max_edge(const WeightField& field, std::span<const VertexId> path);

/// Empirical tail P[|C| >= m], m = 1..max_size, of a sample of cluster sizes.
struct SizeTail {
  std::vector<std::size_t> m;
  std::vector<double> p;
};
SizeTail cluster_size_tail(const std::vector<std::size_t>& sizes, std::size_t max_size);

}  // namespace fpp
