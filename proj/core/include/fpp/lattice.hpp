#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fpp {

inline constexpr int kMaxDim = 4;

using Coord = std::array<int, kMaxDim>;
using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr VertexId kNoVertex = static_cast<VertexId>(-1);
inline constexpr EdgeId kNoEdge = static_cast<EdgeId>(-1);

enum class Adjacency { Zd, Ld };

// An edge of Z^d is named by its lexicographically smaller endpoint and the
// axis along which it points.
struct Edge {
  VertexId lower;
  int axis;
};

/// Finite axis-aligned window [lower, upper] of Z^d.
///
/// Vertices are indexed lexicographically by coordinates (axis 0 most
/// significant). Edges are indexed by lower endpoint, then axis. Both maps are
/// dense bijections onto [0, num_vertices) and [0, num_edges).
///
/// A Region is an immutable value; copies share their lookup tables.
class Region {
 public:
  Region(int dim, const Coord& lower, const Coord& upper);

  /// The cube [-half_width, half_width]^dim.
  static Region cube(int dim, int half_width);

  int dim() const noexcept { return t_->dim; }
  const Coord& lower() const noexcept { return t_->lower; }
  const Coord& upper() const noexcept { return t_->upper; }
  int extent(int axis) const noexcept { return t_->upper[axis] - t_->lower[axis] + 1; }
  std::size_t num_vertices() const noexcept { return t_->num_vertices; }
  std::size_t num_edges() const noexcept { return t_->edge_lower.size(); }
  int degree() const noexcept { return 2 * t_->dim; }

  bool contains(const Coord& c) const noexcept;
  VertexId index(const Coord& c) const;  // throws DomainError outside the window
  Coord coords(VertexId v) const noexcept;
  int coord(VertexId v, int axis) const noexcept;

  Edge edge(EdgeId e) const noexcept { return {t_->edge_lower[e], t_->edge_axis[e]}; }
  std::pair<VertexId, VertexId> endpoints(EdgeId e) const noexcept;
  EdgeId edge_index(VertexId lower, int axis) const;  // throws DomainError if absent
  std::optional<EdgeId> find_edge(VertexId u, VertexId v) const noexcept;

  // Window-independent identity of an edge: lower endpoint coordinates and
  // axis. Used to key random draws so nested windows agree on shared edges.
  std::array<std::int32_t, kMaxDim + 1> global_edge_key(EdgeId e) const noexcept;

  /// True iff some coordinate of v sits on lower or upper.
  bool on_face(VertexId v) const noexcept;
  /// L-infinity distance from v to the window faces (0 on a face).
  int face_margin(VertexId v) const noexcept;

  /// Fixed-degree Z^d adjacency: slot j in [0, 2d) of vertex v. Slot 2a is the
  /// +e_a neighbour, slot 2a+1 the -e_a neighbour; kNoVertex when truncated.
  VertexId zd_slot_vertex(VertexId v, int slot) const noexcept {
    return t_->nbr[static_cast<std::size_t>(v) * t_->dim * 2 + slot];
  }
  EdgeId zd_slot_edge(VertexId v, int slot) const noexcept {
    return t_->nbr_edge[static_cast<std::size_t>(v) * t_->dim * 2 + slot];
  }

  template <class F>
  void for_each_zd_neighbor(VertexId v, F&& f) const {
    const std::size_t base = static_cast<std::size_t>(v) * t_->dim * 2;
    for (int j = 0; j < 2 * t_->dim; ++j) {
      const VertexId u = t_->nbr[base + j];
      if (u != kNoVertex) f(u, t_->nbr_edge[base + j]);
    }
  }

  template <class F>
  void for_each_ld_neighbor(VertexId v, F&& f) const {
    const Coord c = coords(v);
    for (const Coord& off : t_->ld_offsets) {
      Coord u = c;
      bool inside = true;
      for (int a = 0; a < t_->dim; ++a) {
        u[a] += off[a];
        if (u[a] < t_->lower[a] || u[a] > t_->upper[a]) {
          inside = false;
          break;
        }
      }
      if (inside) f(index_unchecked(u));
    }
  }

  std::vector<VertexId> zd_neighbors(VertexId v) const;
  std::vector<VertexId> ld_neighbors(VertexId v) const;

  /// The 3^d - 1 nonzero offsets in {-1,0,1}^d.
  std::span<const Coord> ld_offsets() const noexcept { return t_->ld_offsets; }

  VertexId index_unchecked(const Coord& c) const noexcept;

  friend bool operator==(const Region& a, const Region& b) noexcept {
    return a.t_ == b.t_ || (a.dim() == b.dim() && a.lower() == b.lower() && a.upper() == b.upper());
  }

 private:
  struct Tables {
    int dim = 0;
    Coord lower{};
    Coord upper{};
    std::array<std::size_t, kMaxDim> stride{};
    std::size_t num_vertices = 0;
    std::vector<VertexId> nbr;
    std::vector<EdgeId> nbr_edge;
    std::vector<VertexId> edge_lower;
    std::vector<int> edge_axis;
    std::vector<Coord> ld_offsets;
  };
  std::shared_ptr<const Tables> t_;
};

double euclidean_distance(const Coord& a, const Coord& b, int dim) noexcept;

/// Membership mask over the vertices of one Region.
class VertexSet {
 public:
  explicit VertexSet(Region region);
  VertexSet(Region region, std::span<const VertexId> members);

  static VertexSet all(Region region);

  const Region& region() const noexcept { return region_; }
  bool contains(VertexId v) const noexcept { return mask_[v] != 0; }
  void insert(VertexId v) noexcept;
  void erase(VertexId v) noexcept;
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  std::vector<VertexId> members() const;
  std::span<const std::uint8_t> mask() const noexcept { return mask_; }

  VertexSet united(const VertexSet& other) const;
  VertexSet intersected(const VertexSet& other) const;
  VertexSet complement() const;
  bool intersects(const VertexSet& other) const;
  bool subset_of(const VertexSet& other) const;

  friend bool operator==(const VertexSet& a, const VertexSet& b) noexcept {
    return a.region_ == b.region_ && a.mask_ == b.mask_;
  }

 private:
  Region region_;
  std::vector<std::uint8_t> mask_;
  std::size_t count_ = 0;
};

// Coordinate-level neighbour queries; throw DomainError when v is outside.
std::vector<Coord> zd_neighbors(const Coord& v, const Region& region);
std::vector<Coord> ld_neighbors(const Coord& v, const Region& region);

/// Half-width ceil(3^d * M * (ln n)^(1+delta)) of the box D_n.
int box_half_width(int dim, long n, double M, double delta);

/// D_n(center) intersected with the region.
VertexSet box_D_n(const Coord& center, long n, double M, double delta, const Region& region);

/// center + [-half_width, half_width]^d intersected with the region.
VertexSet box(const Coord& center, int half_width, const Region& region);

struct Boundaries {
  VertexSet inner;               // boundary vertices of A
  VertexSet outer;               // outside boundary of A
  std::vector<EdgeId> edges;     // Z^d edges between inner and outer
};

/// Boundary, outside boundary and boundary edges of A under the given
/// adjacency. Only neighbours inside the window are considered.
Boundaries boundaries(const VertexSet& A, Adjacency adjacency);

/// Exterior boundary: L^d outside-boundary vertices of A from which a Z^d path
/// avoiding A reaches the window faces. Requires A to stay off the faces.
VertexSet exterior_boundary(const VertexSet& A);

/// Vertices of the window reachable from the faces by Z^d paths avoiding A.
VertexSet reachable_from_faces(const VertexSet& A);

/// Z^d-connectivity of a vertex set (empty sets count as connected).
bool zd_connected(const VertexSet& A);

}  // namespace fpp
