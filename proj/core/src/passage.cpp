#include "fpp/passage.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <string>

#include "fpp/errors.hpp"
#include "fpp/numeric.hpp"

namespace fpp {

Dijkstra::Dijkstra(Region region, std::span<const double> weights, const VertexSet* allowed)
    : region_(std::move(region)),
      w_(weights),
      allowed_(allowed),
      dist_(region_.num_vertices(), kUnreachable),
      pred_(region_.num_vertices(), kNoVertex),
      settled_(region_.num_vertices(), 0) {
  if (w_.size() != region_.num_edges()) throw DomainError("weight vector does not match region edges");
  if (allowed_ && !(allowed_->region() == region_)) throw DomainError("allowed set lives on another region");
}

void Dijkstra::push(VertexId v, double d, VertexId from) {
  if (d < dist_[v]) {
    dist_[v] = d;
    pred_[v] = from;
    heap_.emplace_back(d, v);
    std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
  } else if (d == dist_[v] && !settled_[v] && pred_[v] != kNoVertex && (from == kNoVertex || from < pred_[v])) {
    pred_[v] = from;
  }
}

void Dijkstra::seed(VertexId v, double label) {
  if (!(label >= 0.0)) throw DomainError("initial labels must be nonnegative");
  if (allowed_ && !allowed_->contains(v)) return;
  if (settled_[v]) throw DomainError("cannot seed a settled vertex");
  push(v, label, kNoVertex);
}

double Dijkstra::peek() {
  while (!heap_.empty()) {
    const auto [d, v] = heap_.front();
    if (!settled_[v] && d == dist_[v]) return d;
    std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
    heap_.pop_back();
  }
  return kUnreachable;
}

bool Dijkstra::exhausted() { return peek() == kUnreachable; }

VertexId Dijkstra::settle_next(double limit) {
  const double d = peek();
  if (d == kUnreachable || d > limit) return kNoVertex;
  const VertexId v = heap_.front().second;
  std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
  heap_.pop_back();
  settled_[v] = 1;
  order_.push_back(v);
  region_.for_each_zd_neighbor(v, [&](VertexId u, EdgeId e) {
    if (settled_[u] || (allowed_ && !allowed_->contains(u))) return;
    push(u, d + w_[e], v);
  });
  return v;
}

std::vector<VertexId> Dijkstra::path_to(VertexId v) const {
  std::vector<VertexId> path;
  if (dist_[v] == kUnreachable) return path;
  for (VertexId u = v; u != kNoVertex; u = pred_[u]) path.push_back(u);
  std::reverse(path.begin(), path.end());
  return path;
}

PathResult make_path_result(const Region& region, std::span<const double> weights, std::vector<VertexId> path,
                            double time) {
  PathResult r;
  if (path.empty()) return r;
  r.reached = true;
  r.time = time;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto e = region.find_edge(path[i - 1], path[i]);
    if (!e) throw DomainError("path vertices are not Z^d-adjacent");
    r.edges.push_back(*e);
    r.max_edge = std::max(r.max_edge, weights[*e]);
  }
  r.path = std::move(path);
  return r;
}

PathResult passage_time(const Region& region, std::span<const double> weights, const VertexSet& source,
                        const VertexSet& target, const VertexSet* allowed) {
  if (source.empty() || target.empty()) throw DomainError("source and target must be nonempty");
  if (!(source.region() == region) || !(target.region() == region)) {
    throw DomainError("source or target lives on another region");
  }
  Dijkstra dj(region, weights, allowed);
  for (VertexId v : source.members()) dj.seed(v, 0.0);
  while (true) {
    const VertexId v = dj.settle_next();
    if (v == kNoVertex) return {};
    if (target.contains(v)) return make_path_result(region, weights, dj.path_to(v), dj.dist(v));
  }
}

PathResult passage_time(const WeightField& field, const VertexSet& source, const VertexSet& target,
                        const VertexSet* allowed) {
  return passage_time(field.region(), field.values(), source, target, allowed);
}

PathResult passage_time(const TauField& field, const VertexSet& source, const VertexSet& target,
                        const VertexSet* allowed) {
  return passage_time(field.region(), field.values(), source, target, allowed);
}

// ---------------------------------------------------------------------------

Region line_window(int dim, long length, int pad, int transverse, std::size_t max_vertices) {
  if (dim < 2 || dim > kMaxDim) throw DomainError("dimension must be in [2, 4]");
  if (length < 0 || pad < 0 || transverse < 0) throw DomainError("window extents must be nonnegative");
  double count = static_cast<double>(length + 2L * pad + 1);
  for (int a = 1; a < dim; ++a) count *= static_cast<double>(2L * transverse + 1);
  if (count > static_cast<double>(max_vertices)) {
    throw CapacityError("window for n = " + std::to_string(length) + " needs " +
                        std::to_string(static_cast<long long>(count)) + " vertices, limit is " +
                        std::to_string(max_vertices));
  }
  Coord lo{}, hi{};
  lo[0] = -pad;
  hi[0] = static_cast<int>(length) + pad;
  for (int a = 1; a < dim; ++a) {
    lo[a] = -transverse;
    hi[a] = transverse;
  }
  return Region(dim, lo, hi);
}

Coord axis_point(long x1) {
  Coord c{};
  c[0] = static_cast<int>(x1);
  return c;
}

namespace {

// All window vertices with lo <= x <= hi coordinatewise.
VertexSet sub_box(const Region& region, Coord lo, Coord hi) {
  VertexSet out(region);
  const int d = region.dim();
  for (int a = 0; a < d; ++a) {
    lo[a] = std::max(lo[a], region.lower()[a]);
    hi[a] = std::min(hi[a], region.upper()[a]);
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

void require_x1(const Region& region, long x) {
  if (x < region.lower()[0] || x > region.upper()[0]) {
    throw DomainError("hyperplane x_1 = " + std::to_string(x) + " lies outside the window");
  }
}

}  // namespace

VertexSet slab(const Region& region, long lo, long hi) {
  require_x1(region, lo);
  require_x1(region, hi);
  Coord a = region.lower(), b = region.upper();
  a[0] = static_cast<int>(lo);
  b[0] = static_cast<int>(hi);
  return sub_box(region, a, b);
}

VertexSet hyperplane(const Region& region, long x) { return slab(region, x, x); }

VertexSet face_cube(const Region& region, long x, int h) {
  require_x1(region, x);
  Coord a{}, b{};
  a[0] = b[0] = static_cast<int>(x);
  for (int k = 1; k < region.dim(); ++k) {
    a[k] = -h;
    b[k] = h;
  }
  return sub_box(region, a, b);
}

int face_cube_half_width(long n, double delta) {
  return static_cast<int>(std::ceil(tau_threshold(n, delta))) / 2;
}

PathResult a_0n(const WeightField& field, long n) {
  const Region& r = field.region();
  return passage_time(field, VertexSet(r, std::vector<VertexId>{r.index(axis_point(0))}),
                      VertexSet(r, std::vector<VertexId>{r.index(axis_point(n))}));
}

PathResult b_0n(const WeightField& field, long n) {
  const Region& r = field.region();
  return passage_time(field, VertexSet(r, std::vector<VertexId>{r.index(axis_point(0))}), hyperplane(r, n));
}

PathResult phi(const WeightField& field, long k, long m) {
  if (k >= m) throw DomainError("face-face time needs k < m");
  const Region& r = field.region();
  const VertexSet allowed = slab(r, k, m);
  return passage_time(field, hyperplane(r, k), hyperplane(r, m), &allowed);
}

PathResult s_0n(const WeightField& field, long n, int h) {
  const Region& r = field.region();
  return passage_time(field, face_cube(r, 0, h), face_cube(r, n, h));
}

BoxPair box_pair(const Region& region, long n, int half_width) {
  if (half_width < 0) throw DomainError("box half-width must be nonnegative");
  return {box(axis_point(0), half_width, region), box(axis_point(n), half_width, region), half_width};
}

Region BoxGeometry::window(std::size_t max_vertices) const {
  if (half_width > pad || half_width > transverse) throw ConfigError("boxes do not fit inside the window");
  return line_window(dim, n, pad, transverse, max_vertices);
}

// ---------------------------------------------------------------------------

std::string_view to_string(BallStatus status) {
  switch (status) {
    case BallStatus::Hit: return "hit";
    case BallStatus::KMaxReached: return "k_max";
    case BallStatus::WindowTruncated: return "window_truncated";
  }
  return "?";
}

double BallSequence::distance(VertexId v) const noexcept {
  return map_->settled(v) ? map_->dist(v) : kUnreachable;
}

VertexSet BallSequence::ball(int k) const {
  if (k < 0 || k > limit_) throw DomainError("ball index outside the computed range");
  VertexSet b(region());
  for (VertexId v : map_->settle_order()) {
    if (map_->dist(v) > k) break;
    b.insert(v);
  }
  return b;
}

std::vector<VertexId> BallSequence::optimal_path() const {
  if (hit_ == kNoVertex) return {};
  return map_->path_to(hit_);
}

BallSequence ball_growth(const TauField& tf, const VertexSet& source, const VertexSet& target, int k_max) {
  if (k_max < 0) throw DomainError("k_max must be nonnegative");
  if (source.empty() || target.empty()) throw DomainError("source and target must be nonempty");
  const Region& r = tf.region();
  BallSequence seq(source);
  seq.weights_ = std::make_shared<const std::vector<double>>(tf.values().begin(), tf.values().end());
  seq.map_ = std::make_shared<Dijkstra>(r, *seq.weights_);
  seq.k_max_ = k_max;
  Dijkstra& dj = *seq.map_;
  for (VertexId v : source.members()) dj.seed(v, 0.0);
  double limit = k_max;
  while (true) {
    const VertexId v = dj.settle_next(limit);
    if (v == kNoVertex) break;
    if (r.on_face(v)) seq.touches_face_ = true;
    if (seq.hit_ == kNoVertex && target.contains(v)) {
      seq.hit_ = v;
      seq.target_time_ = dj.dist(v);
      seq.k_star_ = static_cast<int>(std::ceil(dj.dist(v)));
      limit = *seq.k_star_;
    }
  }
  seq.limit_ = static_cast<int>(limit);
  if (seq.hit_ != kNoVertex) {
    seq.status_ = BallStatus::Hit;
  } else if (seq.touches_face_ || dj.exhausted()) {
    seq.status_ = BallStatus::WindowTruncated;
  } else {
    seq.status_ = BallStatus::KMaxReached;
  }
  return seq;
}

VertexSet tau_ball(const TauField& tf, const VertexSet& source, double k) {
  Dijkstra dj(tf.region(), tf.values());
  for (VertexId v : source.members()) dj.seed(v, 0.0);
  VertexSet b(tf.region());
  for (VertexId v = dj.settle_next(k); v != kNoVertex; v = dj.settle_next(k)) b.insert(v);
  return b;
}

BallInvariants check_ball_invariants(const BallSequence& seq) {
  BallInvariants inv;
  std::optional<VertexSet> prev;
  for (int k = 0; k <= seq.limit(); ++k) {
    const VertexSet b = seq.ball(k);
    if (prev && !prev->subset_of(b)) inv.nested = false;
    if (!seq.source().subset_of(b)) inv.contains_source = false;
    if (!zd_connected(b)) inv.connected = false;
    for (VertexId v : b.members()) {
      if (!(seq.distance(v) <= k)) inv.inside_le_k = false;
    }
    if (b.size() < seq.region().num_vertices()) {
      for (VertexId u : boundaries(b, Adjacency::Zd).outer.members()) {
        if (!(seq.distance(u) > k)) inv.outside_gt_k = false;
      }
    }
    inv.checked_k = k;
    prev = b;
  }
  return inv;
}

Lemma2Check verify_lemma2(const BallSequence& seq, const TauField& tf, const VertexSet& target, int k, double tol) {
  const Region& r = tf.region();
  const VertexSet b = seq.ball(k);
  Lemma2Check c;
  if (b.intersects(target)) {
    c.skipped = true;
    return c;
  }
  const PathResult total = passage_time(tf, seq.source(), target);
  if (!total.reached) {
    c.skipped = true;
    return c;
  }
  c.total = total.time;

  Dijkstra dj(r, tf.values());
  for (VertexId v : b.members()) {
    r.for_each_zd_neighbor(v, [&](VertexId w, EdgeId e) {
      if (!b.contains(w)) dj.seed(w, seq.distance(v) + tf[e] - k);
    });
  }
  c.from_ball = kUnreachable;
  for (VertexId v = dj.settle_next(); v != kNoVertex; v = dj.settle_next()) {
    if (target.contains(v)) {
      c.from_ball = dj.dist(v);
      break;
    }
  }
  c.residual = std::abs(k + c.from_ball - c.total);
  c.identity = c.residual <= tol;

  c.from_ball_vertices = passage_time(tf, b, target).time;
  const double lhs = k + c.from_ball_vertices;
  c.vertex_bounds = c.total <= lhs + tol && lhs <= c.total + total.max_edge + tol;
  return c;
}

BoundCheck verify_lemma3(const TauField& tf, const PathResult& path) {
  BoundCheck c;
  if (!path.reached) {
    c.skipped = true;
    return c;
  }
  const TauParams& p = tf.params();
  c.bound = std::pow(3.0, tf.region().dim()) * p.M * p.threshold();
  for (EdgeId e : path.edges) c.value = std::max(c.value, tf[e]);
  c.holds = c.value <= c.bound;
  return c;
}

namespace {

// Breadth-first distances from a set under the given adjacency.
std::vector<int> hop_distance(const VertexSet& from, Adjacency adjacency) {
  const Region& r = from.region();
  std::vector<int> dist(r.num_vertices(), -1);
  std::deque<VertexId> queue;
  for (VertexId v : from.members()) {
    dist[v] = 0;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    auto visit = [&](VertexId u) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    };
    if (adjacency == Adjacency::Zd) {
      r.for_each_zd_neighbor(v, [&](VertexId u, EdgeId) { visit(u); });
    } else {
      r.for_each_ld_neighbor(v, visit);
    }
  }
  return dist;
}

}  // namespace

BoundCheck verify_lemma5(const BallSequence& seq, double theta) {
  // King-move hop counts are L-infinity distances in a box-shaped window.
  const std::vector<int> linf = hop_distance(seq.source(), Adjacency::Ld);
  BoundCheck c;
  c.holds = true;
  double worst = -1.0;
  for (int k = 0; k <= seq.limit(); ++k) {
    const double bound = (k + 1) * theta;
    int reach = 0;
    for (VertexId v : seq.ball(k).members()) reach = std::max(reach, linf[v]);
    if (reach > bound) c.holds = false;
    if (reach / bound > worst) {
      worst = reach / bound;
      c.value = reach;
      c.bound = bound;
    }
  }
  return c;
}

BoundCheck verify_lemma6(const TauField& tf, const VertexSet& source, const VertexSet& target) {
  BoundCheck c;
  const std::vector<int> hops = hop_distance(source, Adjacency::Zd);
  int L = -1;
  for (VertexId v : target.members()) {
    if (hops[v] >= 0 && (L < 0 || hops[v] < L)) L = hops[v];
  }
  if (L < 0) {
    c.skipped = true;
    return c;
  }
  const TauParams& p = tf.params();
  c.bound = L * p.M * std::pow(3.0, tf.region().dim()) * p.threshold();
  c.value = passage_time(tf, source, target).time;
  c.holds = c.value <= c.bound;
  return c;
}

BoundCheck verify_lemma7(const BallSequence& seq, const TauField& tf, const VertexSet& target, int k) {
  BoundCheck c;
  if (!seq.k_star() || k < *seq.k_star()) {
    c.skipped = true;
    return c;
  }
  const VertexSet b = seq.ball(std::min(k, seq.limit()));
  const PathResult path = passage_time(tf, seq.source(), target);
  c.bound = k;
  c.holds = path.reached;
  for (VertexId v : path.path) {
    c.value = std::max(c.value, seq.distance(v));
    if (!b.contains(v)) c.holds = false;
  }
  return c;
}

SandwichCheck sandwich_check(const WeightField& field, const BoxPair& boxes, long n, double tol) {
  const Region& r = field.region();
  SandwichCheck c;
  c.box_time = passage_time(field, boxes.source, boxes.target).time;
  c.point_time = a_0n(field, n).time;
  std::vector<double> inside;
  for (std::size_t i = 0; i < r.num_edges(); ++i) {
    const auto [a, b] = r.endpoints(static_cast<EdgeId>(i));
    if ((boxes.source.contains(a) && boxes.source.contains(b)) ||
        (boxes.target.contains(a) && boxes.target.contains(b))) {
      inside.push_back(field[static_cast<EdgeId>(i)]);
    }
  }
  c.box_weight = pairwise_sum(inside);
  c.lower = c.box_time <= c.point_time + tol;
  c.upper = c.point_time <= c.box_weight + c.box_time + tol;
  return c;
}

CrossingCheck crossing_check(const WeightField& field, long n, int h, double tol) {
  CrossingCheck c;
  for (int j = 0; j < 4; ++j) c.phi[j] = phi(field, j * n, (j + 1) * n).time;
  c.phi_sum = pairwise_sum(c.phi);
  c.s = s_0n(field, 4 * n, h).time;
  c.holds = c.phi_sum <= c.s + tol;
  return c;
}

Sensitivity transverse_sensitivity(const DistributionSpec& dist, std::uint64_t seed, int dim, long n, int pad,
                                   int transverse, int h, double tol) {
  Sensitivity s;
  const WeightField narrow = sample_configuration(line_window(dim, n, pad, transverse), dist, seed);
  const WeightField wide = sample_configuration(line_window(dim, n, pad, 2 * transverse), dist, seed);
  s.phi_narrow = phi(narrow, 0, n).time;
  s.phi_wide = phi(wide, 0, n).time;
  s.s_narrow = s_0n(narrow, n, h).time;
  s.s_wide = s_0n(wide, n, h).time;
  s.flagged = std::abs(s.phi_narrow - s.phi_wide) > tol || std::abs(s.s_narrow - s.s_wide) > tol;
  return s;
}

Shell shell(const VertexSet& gamma, double theta) {
  if (gamma.empty()) throw DomainError("shell of an empty set");
  const Region& r = gamma.region();
  Shell s{VertexSet(r), VertexSet(r)};
  if (gamma.size() == r.num_vertices()) return s;
  // The nearest point of gamma to an outside vertex is a boundary vertex.
  std::vector<Coord> edge_pts;
  for (VertexId v : boundaries(gamma, Adjacency::Zd).inner.members()) edge_pts.push_back(r.coords(v));
  const int d = r.dim();
  const double lo = 2.0 * theta, hi = 1.0 + 2.0 * theta;
  for (std::size_t i = 0; i < r.num_vertices(); ++i) {
    const auto v = static_cast<VertexId>(i);
    if (gamma.contains(v)) continue;
    const Coord c = r.coords(v);
    double best = kUnreachable;
    for (const Coord& g : edge_pts) best = std::min(best, euclidean_distance(c, g, d));
    if (best > lo) {
      s.plus.insert(v);
      if (best < hi) s.inner.insert(v);
    }
  }
  return s;
}

Shell shell(const VertexSet& gamma, long n, double delta) { return shell(gamma, tau_threshold(n, delta)); }

}  // namespace fpp
