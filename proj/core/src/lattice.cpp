#include "fpp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "fpp/errors.hpp"

namespace fpp {

namespace {

void enumerate_offsets(int dim, int axis, Coord& cur, std::vector<Coord>& out) {
  if (axis == dim) {
    bool zero = true;
    for (int a = 0; a < dim; ++a) zero = zero && cur[a] == 0;
    if (!zero) out.push_back(cur);
    return;
  }
  for (int s = -1; s <= 1; ++s) {
    cur[axis] = s;
    enumerate_offsets(dim, axis + 1, cur, out);
  }
  cur[axis] = 0;
}

}  // namespace

Region::Region(int dim, const Coord& lower, const Coord& upper) {
  if (dim < 1 || dim > kMaxDim) {
    throw DomainError("region dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  auto t = std::make_shared<Tables>();
  t->dim = dim;
  std::size_t nv = 1;
  for (int a = 0; a < dim; ++a) {
    if (lower[a] > upper[a]) throw DomainError("region lower corner exceeds upper corner");
    t->lower[a] = lower[a];
    t->upper[a] = upper[a];
    nv *= static_cast<std::size_t>(upper[a] - lower[a] + 1);
  }
  if (nv >= static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw CapacityError("region has too many vertices for 32-bit indexing");
  }
  t->num_vertices = nv;
  t->stride[dim - 1] = 1;
  for (int a = dim - 2; a >= 0; --a) {
    t->stride[a] = t->stride[a + 1] * static_cast<std::size_t>(upper[a + 1] - lower[a + 1] + 1);
  }

  const int deg = 2 * dim;
  t->nbr.assign(nv * deg, kNoVertex);
  t->nbr_edge.assign(nv * deg, kNoEdge);
  // Edges in (lower endpoint, axis) order.
  std::vector<int> pos(dim);
  for (std::size_t v = 0; v < nv; ++v) {
    std::size_t rem = v;
    for (int a = 0; a < dim; ++a) {
      pos[a] = static_cast<int>(rem / t->stride[a]);
      rem %= t->stride[a];
    }
    for (int a = 0; a < dim; ++a) {
      if (lower[a] + pos[a] < upper[a]) {
        const auto e = static_cast<EdgeId>(t->edge_lower.size());
        const auto u = static_cast<VertexId>(v + t->stride[a]);
        t->edge_lower.push_back(static_cast<VertexId>(v));
        t->edge_axis.push_back(a);
        t->nbr[v * deg + 2 * a] = u;
        t->nbr_edge[v * deg + 2 * a] = e;
        t->nbr[static_cast<std::size_t>(u) * deg + 2 * a + 1] = static_cast<VertexId>(v);
        t->nbr_edge[static_cast<std::size_t>(u) * deg + 2 * a + 1] = e;
      }
    }
  }
  Coord cur{};
  enumerate_offsets(dim, 0, cur, t->ld_offsets);
  t_ = std::move(t);
}

Region Region::cube(int dim, int half_width) {
  Coord lo{}, hi{};
  for (int a = 0; a < dim; ++a) {
    lo[a] = -half_width;
    hi[a] = half_width;
  }
  return Region(dim, lo, hi);
}

bool Region::contains(const Coord& c) const noexcept {
  for (int a = 0; a < t_->dim; ++a) {
    if (c[a] < t_->lower[a] || c[a] > t_->upper[a]) return false;
  }
  return true;
}

VertexId Region::index_unchecked(const Coord& c) const noexcept {
  std::size_t v = 0;
  for (int a = 0; a < t_->dim; ++a) {
    v += static_cast<std::size_t>(c[a] - t_->lower[a]) * t_->stride[a];
  }
  return static_cast<VertexId>(v);
}

VertexId Region::index(const Coord& c) const {
  if (!contains(c)) throw DomainError("vertex outside region");
  return index_unchecked(c);
}

Coord Region::coords(VertexId v) const noexcept {
  Coord c{};
  std::size_t rem = v;
  for (int a = 0; a < t_->dim; ++a) {
    c[a] = t_->lower[a] + static_cast<int>(rem / t_->stride[a]);
    rem %= t_->stride[a];
  }
  return c;
}

int Region::coord(VertexId v, int axis) const noexcept {
  const std::size_t extent_a = static_cast<std::size_t>(t_->upper[axis] - t_->lower[axis] + 1);
  return t_->lower[axis] + static_cast<int>((v / t_->stride[axis]) % extent_a);
}

std::pair<VertexId, VertexId> Region::endpoints(EdgeId e) const noexcept {
  const VertexId lo = t_->edge_lower[e];
  return {lo, static_cast<VertexId>(lo + t_->stride[t_->edge_axis[e]])};
}

EdgeId Region::edge_index(VertexId lower, int axis) const {
  if (lower >= t_->num_vertices || axis < 0 || axis >= t_->dim) {
    throw DomainError("edge outside region");
  }
  const EdgeId e = zd_slot_edge(lower, 2 * axis);
  if (e == kNoEdge) throw DomainError("edge outside region");
  return e;
}

std::optional<EdgeId> Region::find_edge(VertexId u, VertexId v) const noexcept {
  const std::size_t base = static_cast<std::size_t>(u) * t_->dim * 2;
  for (int j = 0; j < 2 * t_->dim; ++j) {
    if (t_->nbr[base + j] == v) return t_->nbr_edge[base + j];
  }
  return std::nullopt;
}

std::array<std::int32_t, kMaxDim + 1> Region::global_edge_key(EdgeId e) const noexcept {
  std::array<std::int32_t, kMaxDim + 1> key{};
  const Coord c = coords(t_->edge_lower[e]);
  for (int a = 0; a < kMaxDim; ++a) key[a] = c[a];
  key[kMaxDim] = t_->edge_axis[e] + 16 * t_->dim;
  return key;
}

bool Region::on_face(VertexId v) const noexcept { return face_margin(v) == 0; }

int Region::face_margin(VertexId v) const noexcept {
  const Coord c = coords(v);
  int m = std::numeric_limits<int>::max();
  for (int a = 0; a < t_->dim; ++a) {
    m = std::min({m, c[a] - t_->lower[a], t_->upper[a] - c[a]});
  }
  return m;
}

std::vector<VertexId> Region::zd_neighbors(VertexId v) const {
  std::vector<VertexId> out;
  for_each_zd_neighbor(v, [&](VertexId u, EdgeId) { out.push_back(u); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VertexId> Region::ld_neighbors(VertexId v) const {
  std::vector<VertexId> out;
  for_each_ld_neighbor(v, [&](VertexId u) { out.push_back(u); });
  std::sort(out.begin(), out.end());
  return out;
}

double euclidean_distance(const Coord& a, const Coord& b, int dim) noexcept {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = static_cast<double>(a[i] - b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------

VertexSet::VertexSet(Region region) : region_(std::move(region)), mask_(region_.num_vertices(), 0) {}

VertexSet::VertexSet(Region region, std::span<const VertexId> members) : VertexSet(std::move(region)) {
  for (VertexId v : members) insert(v);
}

VertexSet VertexSet::all(Region region) {
  VertexSet s(std::move(region));
  std::fill(s.mask_.begin(), s.mask_.end(), std::uint8_t{1});
  s.count_ = s.mask_.size();
  return s;
}

void VertexSet::insert(VertexId v) noexcept {
  if (!mask_[v]) {
    mask_[v] = 1;
    ++count_;
  }
}

void VertexSet::erase(VertexId v) noexcept {
  if (mask_[v]) {
    mask_[v] = 0;
    --count_;
  }
}

std::vector<VertexId> VertexSet::members() const {
  std::vector<VertexId> out;
  out.reserve(count_);
  for (std::size_t v = 0; v < mask_.size(); ++v) {
    if (mask_[v]) out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

VertexSet VertexSet::united(const VertexSet& other) const {
  if (!(region_ == other.region_)) throw DomainError("vertex sets over different regions");
  VertexSet out(region_);
  for (std::size_t v = 0; v < mask_.size(); ++v) {
    if (mask_[v] || other.mask_[v]) out.insert(static_cast<VertexId>(v));
  }
  return out;
}

VertexSet VertexSet::intersected(const VertexSet& other) const {
  if (!(region_ == other.region_)) throw DomainError("vertex sets over different regions");
  VertexSet out(region_);
  for (std::size_t v = 0; v < mask_.size(); ++v) {
    if (mask_[v] && other.mask_[v]) out.insert(static_cast<VertexId>(v));
  }
  return out;
}

VertexSet VertexSet::complement() const {
  VertexSet out(region_);
  for (std::size_t v = 0; v < mask_.size(); ++v) {
    if (!mask_[v]) out.insert(static_cast<VertexId>(v));
  }
  return out;
}

bool VertexSet::intersects(const VertexSet& other) const {
  for (std::size_t v = 0; v < mask_.size(); ++v) {
    if (mask_[v] && other.mask_[v]) return true;
  }
  return false;
}

bool VertexSet::subset_of(const VertexSet& other) const {
  for (std::size_t v = 0; v < mask_.size(); ++v) {
    if (mask_[v] && !other.mask_[v]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

std::vector<Coord> zd_neighbors(const Coord& v, const Region& region) {
  const VertexId id = region.index(v);
  std::vector<Coord> out;
  for (VertexId u : region.zd_neighbors(id)) out.push_back(region.coords(u));
  return out;
}

std::vector<Coord> ld_neighbors(const Coord& v, const Region& region) {
  const VertexId id = region.index(v);
  std::vector<Coord> out;
  for (VertexId u : region.ld_neighbors(id)) out.push_back(region.coords(u));
  return out;
}

int box_half_width(int dim, long n, double M, double delta) {
  if (n < 2) throw DomainError("D_n requires n >= 2");
  if (!(M > 0.0)) throw DomainError("D_n requires M > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("D_n requires delta in (0, 1)");
  const double width = std::pow(3.0, dim) * M * std::pow(std::log(static_cast<double>(n)), 1.0 + delta);
  return static_cast<int>(std::ceil(width));
}

VertexSet box(const Coord& center, int half_width, const Region& region) {
  VertexSet out(region);
  const int d = region.dim();
  Coord lo{}, hi{};
  for (int a = 0; a < d; ++a) {
    lo[a] = std::max(center[a] - half_width, region.lower()[a]);
    hi[a] = std::min(center[a] + half_width, region.upper()[a]);
    if (lo[a] > hi[a]) return out;
  }
  Coord c = lo;
  while (true) {
    out.insert(region.index_unchecked(c));
    int a = d - 1;
    while (a >= 0 && c[a] == hi[a]) {
      c[a] = lo[a];
      --a;
    }
    if (a < 0) break;
    ++c[a];
  }
  return out;
}

VertexSet box_D_n(const Coord& center, long n, double M, double delta, const Region& region) {
  return box(center, box_half_width(region.dim(), n, M, delta), region);
}

Boundaries boundaries(const VertexSet& A, Adjacency adjacency) {
  if (A.empty()) throw DomainError("boundaries of an empty set");
  const Region& r = A.region();
  Boundaries b{VertexSet(r), VertexSet(r), {}};
  for (VertexId v : A.members()) {
    auto visit = [&](VertexId u) {
      if (!A.contains(u)) {
        b.inner.insert(v);
        b.outer.insert(u);
      }
    };
    if (adjacency == Adjacency::Zd) {
      r.for_each_zd_neighbor(v, [&](VertexId u, EdgeId) { visit(u); });
    } else {
      r.for_each_ld_neighbor(v, visit);
    }
  }
  for (VertexId v : b.inner.members()) {
    r.for_each_zd_neighbor(v, [&](VertexId u, EdgeId e) {
      if (b.outer.contains(u)) b.edges.push_back(e);
    });
  }
  std::sort(b.edges.begin(), b.edges.end());
  return b;
}

VertexSet reachable_from_faces(const VertexSet& A) {
  const Region& r = A.region();
  VertexSet seen(r);
  std::deque<VertexId> queue;
  for (std::size_t v = 0; v < r.num_vertices(); ++v) {
    const auto id = static_cast<VertexId>(v);
    if (r.on_face(id) && !A.contains(id)) {
      seen.insert(id);
      queue.push_back(id);
    }
  }
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    r.for_each_zd_neighbor(v, [&](VertexId u, EdgeId) {
      if (!A.contains(u) && !seen.contains(u)) {
        seen.insert(u);
        queue.push_back(u);
      }
    });
  }
  return seen;
}

VertexSet exterior_boundary(const VertexSet& A) {
  if (A.empty()) throw DomainError("exterior boundary of an empty set");
  const Region& r = A.region();
  for (VertexId v : A.members()) {
    if (r.on_face(v)) {
      throw PreconditionError("set touches the window face; the face cannot stand in for infinity");
    }
  }
  const VertexSet outside = reachable_from_faces(A);
  VertexSet delta(r);
  for (VertexId v : A.members()) {
    r.for_each_ld_neighbor(v, [&](VertexId u) {
      if (!A.contains(u) && outside.contains(u)) delta.insert(u);
    });
  }
  return delta;
}

bool zd_connected(const VertexSet& A) {
  if (A.empty()) return true;
  const Region& r = A.region();
  const auto members = A.members();
  VertexSet seen(r);
  std::deque<VertexId> queue{members.front()};
  seen.insert(members.front());
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    r.for_each_zd_neighbor(v, [&](VertexId u, EdgeId) {
      if (A.contains(u) && !seen.contains(u)) {
        seen.insert(u);
        queue.push_back(u);
      }
    });
  }
  return seen.size() == A.size();
}

}  // namespace fpp
