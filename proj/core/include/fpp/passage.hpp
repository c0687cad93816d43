#pragma once

#include <array>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/tau.hpp"
#include "fpp/weights.hpp"

namespace fpp {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct PathResult {
  double time = kUnreachable;
  bool reached = false;
  std::vector<VertexId> path;  // first vertex in the source, last in the target
  std::vector<EdgeId> edges;
  double max_edge = 0.0;
  std::size_t length() const noexcept { return edges.size(); }
};

/// Label-setting shortest paths over the Z^d edges of a region with
/// nonnegative edge weights and arbitrary initial labels.
///
/// The heap is keyed by (label, vertex index), so equal labels settle in index
/// order. A tentative predecessor is replaced on an exact tie by a smaller
/// vertex index while the vertex is unsettled.
class Dijkstra {
 public:
  Dijkstra(Region region, std::span<const double> weights, const VertexSet* allowed = nullptr);

  /// Offers `label` as an initial distance for v (ignored outside `allowed`).
  void seed(VertexId v, double label);
  /// Settles the next vertex if its label is <= limit; kNoVertex otherwise or
  /// when the heap is exhausted.
  VertexId settle_next(double limit = kUnreachable);
  /// Smallest pending label, +inf if none.
  double peek();
  bool exhausted();

  const Region& region() const noexcept { return region_; }
  double dist(VertexId v) const noexcept { return dist_[v]; }
  bool settled(VertexId v) const noexcept { return settled_[v] != 0; }
  VertexId pred(VertexId v) const noexcept { return pred_[v]; }
  std::span<const VertexId> settle_order() const noexcept { return order_; }
  /// Vertex path from a seed to v through predecessors.
  std::vector<VertexId> path_to(VertexId v) const;

 private:
  using Entry = std::pair<double, VertexId>;
  void push(VertexId v, double d, VertexId from);
  Region region_;
  std::span<const double> w_;
  const VertexSet* allowed_;
  std::vector<double> dist_;
  std::vector<VertexId> pred_;
  std::vector<std::uint8_t> settled_;
  std::vector<VertexId> order_;
  std::vector<Entry> heap_;
};

/// Builds a PathResult for a vertex path over the given weights.
PathResult make_path_result(const Region& region, std::span<const double> weights, std::vector<VertexId> path,
                            double time);

/// T(source, target) over paths inside `allowed` (whole window if null).
/// Unreachable targets give reached = false and time = +inf.
PathResult passage_time(const Region& region, std::span<const double> weights, const VertexSet& source,
                        const VertexSet& target, const VertexSet* allowed = nullptr);
PathResult passage_time(const WeightField& field, const VertexSet& source, const VertexSet& target,
                        const VertexSet* allowed = nullptr);
PathResult passage_time(const TauField& field, const VertexSet& source, const VertexSet& target,
                        const VertexSet* allowed = nullptr);

// ---------------------------------------------------------------------------
// Geometry of the named passage times. The direction is always e_1.

/// Window [-pad, length + pad] x [-transverse, transverse]^(d-1).
/// Throws CapacityError above max_vertices.
Region line_window(int dim, long length, int pad, int transverse, std::size_t max_vertices = 50'000'000);

Coord axis_point(long x1);

/// {x_1 = x} inside the window.
VertexSet hyperplane(const Region& region, long x);
/// {x_1 in [lo, hi]} inside the window.
VertexSet slab(const Region& region, long lo, long hi);
/// {x_1 = x} x [-h, h]^(d-1).
VertexSet face_cube(const Region& region, long x, int h);
/// Transverse half-width of the cubes S_0(.): floor(ceil(theta_n) / 2).
int face_cube_half_width(long n, double delta);

/// Point to point T(0, n e_1).
PathResult a_0n(const WeightField& field, long n);
/// Point to hyperplane T(0, {x_1 = n}).
PathResult b_0n(const WeightField& field, long n);
/// Face-face time from {x_1 = k} to {x_1 = m} through the closed slab.
PathResult phi(const WeightField& field, long k, long m);
/// Cube-cube time from face_cube(0, h) to face_cube(n, h), unrestricted.
PathResult s_0n(const WeightField& field, long n, int h);

struct BoxPair {
  VertexSet source;
  VertexSet target;
  int half_width = 0;
};

/// Boxes of the given half-width centred at 0 and n e_1.
BoxPair box_pair(const Region& region, long n, int half_width);

/// Two boxes at distance n along e_1 inside a line window.
struct BoxGeometry {
  int dim = 2;
  long n = 32;
  int half_width = 2;
  int pad = 32;
  int transverse = 32;

  Region window(std::size_t max_vertices = 50'000'000) const;
  BoxPair boxes(const Region& window) const { return box_pair(window, n, half_width); }
};

// ---------------------------------------------------------------------------
// Growth balls B(k) = {v : T_tau(source, v) <= k}.

enum class BallStatus { Hit, KMaxReached, WindowTruncated };

std::string_view to_string(BallStatus status);

class BallSequence {
 public:
  const Region& region() const noexcept { return map_->region(); }
  const VertexSet& source() const noexcept { return source_; }
  /// Distances are exact for every vertex with T <= limit().
  int limit() const noexcept { return limit_; }
  int k_max() const noexcept { return k_max_; }
  std::optional<int> k_star() const noexcept { return k_star_; }
  BallStatus status() const noexcept { return status_; }
  /// T_tau(source, target) when hit, +inf otherwise.
  double target_time() const noexcept { return target_time_; }

  /// Exact distance if settled, otherwise +inf (the true value exceeds limit()).
  double distance(VertexId v) const noexcept;
  bool known(VertexId v) const noexcept { return map_->settled(v); }
  /// True when some swept vertex lies on the window face.
  bool touches_face() const noexcept { return touches_face_; }
  /// B(k); requires 0 <= k <= limit().
  VertexSet ball(int k) const;
  /// Optimal source-target path recovered from the sweep (hit only).
  std::vector<VertexId> optimal_path() const;

  friend BallSequence ball_growth(const TauField&, const VertexSet&, const VertexSet&, int);

 private:
  explicit BallSequence(VertexSet source) : source_(std::move(source)) {}
  VertexSet source_;
  std::shared_ptr<const std::vector<double>> weights_;
  std::shared_ptr<Dijkstra> map_;
  int k_max_ = 0;
  int limit_ = 0;
  std::optional<int> k_star_;
  VertexId hit_ = kNoVertex;
  double target_time_ = kUnreachable;
  bool touches_face_ = false;
  BallStatus status_ = BallStatus::KMaxReached;
};

/// One sweep from `source`, stopping at the first integer k that meets the
/// target (k*) or at k_max. Status is WindowTruncated when the swept region
/// reaches the window face.
BallSequence ball_growth(const TauField& tf, const VertexSet& source, const VertexSet& target, int k_max);

/// {v : T(source, v) <= k} by a sweep that stops above level k.
VertexSet tau_ball(const TauField& tf, const VertexSet& source, double k);

struct BallInvariants {
  bool nested = true;            // B(k) within B(k+1)
  bool contains_source = true;   // source within B(k)
  bool connected = true;         // B(k) Z^d-connected
  bool inside_le_k = true;       // v in B(k) => T <= k
  bool outside_gt_k = true;      // v in outer boundary of B(k) => T > k
  int checked_k = 0;
  bool all() const noexcept { return nested && contains_source && connected && inside_le_k && outside_gt_k; }
};

BallInvariants check_ball_invariants(const BallSequence& seq);

struct Lemma2Check {
  bool skipped = false;     // target already met by B(k)
  bool identity = false;    // |k + T(B(k), target) - T(source, target)| <= tol
  bool vertex_bounds = false;
  double total = 0.0;       // T(source, target), computed afresh
  double from_ball = 0.0;   // T(B(k), target), edges leaving B(k) charged from level k
  double from_ball_vertices = 0.0;  // T(B(k), target) with B(k) as a vertex set
  double residual = 0.0;
};

/// Checks k + T(B(k), target) = T(source, target). B(k) is read as the
/// region of the continuous metric within distance k, so an edge (v, w)
/// leaving the ball contributes T(v) + tau(v, w) - k. The vertex-set reading
/// satisfies only T <= k + T_vertex < T + (largest tau on the optimal path);
/// that bound is checked as well.
Lemma2Check verify_lemma2(const BallSequence& seq, const TauField& tf, const VertexSet& target, int k,
                          double tol = 1e-9);

struct BoundCheck {
  bool skipped = false;
  bool holds = false;
  double value = 0.0;
  double bound = 0.0;
};

/// Largest tau on the path against 3^d M (ln n)^(1+delta).
BoundCheck verify_lemma3(const TauField& tf, const PathResult& path);

/// B(k) within L-infinity distance (k+1) (ln n)^(1+delta) of the source, for
/// every k up to limit(). value/bound report the worst ratio's terms.
BoundCheck verify_lemma5(const BallSequence& seq, double theta);

/// T_tau(source, target) <= L * M * 3^d * (ln n)^(1+delta), L the Z^d graph
/// distance between the sets.
BoundCheck verify_lemma6(const TauField& tf, const VertexSet& source, const VertexSet& target);

/// The recovered optimal path lies in B(k) for k >= k* (skipped otherwise).
BoundCheck verify_lemma7(const BallSequence& seq, const TauField& tf, const VertexSet& target, int k);

struct SandwichCheck {
  double box_time = 0.0;    // T(D(0), D(n e_1))
  double point_time = 0.0;  // T(0, n e_1)
  double box_weight = 0.0;  // sum of t(e) over edges inside either box
  bool lower = false;
  bool upper = false;
  bool holds() const noexcept { return lower && upper; }
};

SandwichCheck sandwich_check(const WeightField& field, const BoxPair& boxes, long n, double tol = 1e-9);

struct CrossingCheck {
  std::array<double, 4> phi{};
  double phi_sum = 0.0;
  double s = 0.0;  // s_{0,4n}
  bool holds = false;
};

/// Phi_{0,n} + Phi_{n,2n} + Phi_{2n,3n} + Phi_{3n,4n} <= s_{0,4n}.
CrossingCheck crossing_check(const WeightField& field, long n, int h, double tol = 1e-9);

struct Sensitivity {
  double phi_narrow = 0.0, phi_wide = 0.0;
  double s_narrow = 0.0, s_wide = 0.0;
  bool flagged = false;  // either differs by more than tol
};

/// Phi_{0,n} and s_{0,n} computed with transverse half-width W and 2W on
/// nested windows that share their edge weights.
Sensitivity transverse_sensitivity(const DistributionSpec& dist, std::uint64_t seed, int dim, long n, int pad,
                                   int transverse, int h, double tol = 1e-9);

struct Shell {
  VertexSet inner;  // 2 theta < d(u, gamma) < 1 + 2 theta
  VertexSet plus;   // d(u, gamma) > 2 theta
};

Shell shell(const VertexSet& gamma, double theta);
Shell shell(const VertexSet& gamma, long n, double delta);

}  // namespace fpp
