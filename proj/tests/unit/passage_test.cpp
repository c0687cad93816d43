#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "fpp/errors.hpp"
#include "fpp/numeric.hpp"
#include "fpp/passage.hpp"
#include "generators.hpp"

namespace fpp {
namespace {

Coord c2(int x, int y) { return Coord{x, y, 0, 0}; }

VertexSet single(const Region& r, const Coord& c) { return VertexSet(r, std::vector<VertexId>{r.index(c)}); }

TauParams default_tau(long n) {
  TauParams p;
  p.n = n;
  return p;
}

void expect_valid_path(const Region& r, std::span<const double> w, const PathResult& p, const VertexSet& source,
                       const VertexSet& target) {
  ASSERT_TRUE(p.reached);
  ASSERT_FALSE(p.path.empty());
  EXPECT_TRUE(source.contains(p.path.front()));
  EXPECT_TRUE(target.contains(p.path.back()));
  ASSERT_EQ(p.edges.size() + 1, p.path.size());
  std::vector<double> ws;
  double mx = 0.0;
  for (std::size_t i = 0; i + 1 < p.path.size(); ++i) {
    const auto e = r.find_edge(p.path[i], p.path[i + 1]);
    ASSERT_TRUE(e.has_value());
    EXPECT_EQ(*e, p.edges[i]);
    ws.push_back(w[*e]);
    mx = std::max(mx, w[*e]);
  }
  EXPECT_NEAR(pairwise_sum(ws), p.time, 1e-12);
  EXPECT_EQ(p.max_edge, mx);
  EXPECT_EQ(p.length(), p.edges.size());
}

// ---------------------------------------------------------------------------

TEST(Passage, FrozenThreeByThreeTable) {
  const Region r(2, c2(0, 0), c2(2, 2));
  const std::vector<double> w{0.7, 0.2, 1.3, 0.4, 0.9, 0.1, 1.1, 0.6, 0.3, 0.8, 0.5, 1.7};
  ASSERT_EQ(w.size(), r.num_edges());
  const auto a = passage_time(r, w, single(r, c2(0, 0)), single(r, c2(2, 2)));
  EXPECT_NEAR(a.time, 2.3, 1e-12);
  expect_valid_path(r, w, a, single(r, c2(0, 0)), single(r, c2(2, 2)));
  const auto b = passage_time(r, w, single(r, c2(0, 2)), single(r, c2(2, 0)));
  EXPECT_NEAR(b.time, 1.4, 1e-12);
}

TEST(Passage, MatchesExhaustiveEnumeration) {
  testing::Gen g(61);
  const std::vector<Region> windows{Region(2, c2(0, 0), c2(2, 2)), Region(2, c2(0, 0), c2(1, 3)),
                                    Region(2, c2(0, 0), c2(3, 1))};
  for (int c = 0; c < 100; ++c) {
    const Region& r = windows[static_cast<std::size_t>(c % 3)];
    const auto w = c % 4 == 3 ? g.tied_weights(r) : g.weights(r, 0.0, 2.0);
    for (int q = 0; q < 5; ++q) {
      VertexSet s = g.subset(r, 0.2), t = g.subset(r, 0.2);
      if (s.empty()) s.insert(g.vertex(r));
      if (t.empty()) t.insert(g.vertex(r));
      const auto res = passage_time(r, w, s, t);
      EXPECT_NEAR(res.time, testing::brute_force_passage(r, w, s.members(), t.members()), 1e-12);
      expect_valid_path(r, w, res, s, t);
    }
  }
}

TEST(Passage, PointMassGraphDistance) {
  const Region r = Region::cube(2, 5);
  const auto f = sample_configuration(r, DistributionSpec::point_mass(1.0), 1);
  const auto p = passage_time(f, single(r, c2(0, 0)), single(r, c2(3, 0)));
  EXPECT_EQ(p.time, 3.0);
  EXPECT_EQ(p.length(), 3u);
}

TEST(Passage, OverlappingSetsGiveZero) {
  const Region r = Region::cube(2, 3);
  const auto f = sample_configuration(r, DistributionSpec::exponential(1.0), 1);
  const VertexSet s = box(c2(0, 0), 1, r), t = box(c2(1, 1), 1, r);
  const auto p = passage_time(f, s, t);
  EXPECT_EQ(p.time, 0.0);
  EXPECT_EQ(p.length(), 0u);
  ASSERT_EQ(p.path.size(), 1u);
  EXPECT_TRUE(s.contains(p.path[0]) && t.contains(p.path[0]));
}

TEST(Passage, UnreachableGivesSentinel) {
  const Region r = Region::cube(2, 3);
  const auto f = sample_configuration(r, DistributionSpec::exponential(1.0), 1);
  const VertexSet allowed = box(c2(-2, 0), 1, r);
  const auto p = passage_time(f, single(r, c2(-2, 0)), single(r, c2(2, 0)), &allowed);
  EXPECT_FALSE(p.reached);
  EXPECT_EQ(p.time, kUnreachable);
  EXPECT_THROW(passage_time(f, VertexSet(r), single(r, c2(0, 0))), DomainError);
}

TEST(Passage, DeterministicTieBreak) {
  const Region r = Region::cube(2, 4);
  const auto f = sample_configuration(r, DistributionSpec::point_mass(1.0), 1);
  const auto a = passage_time(f, single(r, c2(-3, -3)), single(r, c2(3, 3)));
  const auto b = passage_time(f, single(r, c2(-3, -3)), single(r, c2(3, 3)));
  EXPECT_EQ(a.path, b.path);
  // Among equal predecessors the smaller index wins, so the path runs along
  // the low-index side first: along axis 1 before axis 0 when walking back.
  Dijkstra dj(r, f.values());
  dj.seed(r.index(c2(-3, -3)), 0.0);
  while (dj.settle_next() != kNoVertex) {
  }
  for (std::size_t v = 0; v < r.num_vertices(); ++v) {
    const auto id = static_cast<VertexId>(v);
    if (dj.pred(id) == kNoVertex) continue;
    VertexId best = kNoVertex;
    r.for_each_zd_neighbor(id, [&](VertexId u, EdgeId e) {
      if (dj.dist(u) + f[e] == dj.dist(id)) best = std::min(best, u);
    });
    EXPECT_EQ(dj.pred(id), best);
  }
}

TEST(Passage, Subadditivity) {
  testing::Gen g(62);
  for (int c = 0; c < 40; ++c) {
    const Region r = g.region(2, 4, 10);
    const auto f = sample_configuration(r, g.distribution(), g.u64());
    const VertexId u = g.vertex(r), v = g.vertex(r), w = g.vertex(r);
    const auto T = [&](VertexId a, VertexId b) {
      return passage_time(f, VertexSet(r, std::vector<VertexId>{a}), VertexSet(r, std::vector<VertexId>{b})).time;
    };
    EXPECT_LE(T(u, w), T(u, v) + T(v, w) + 1e-12);
    EXPECT_NEAR(T(u, v), T(v, u), 1e-12);
  }
}

TEST(Passage, MonotoneInSingleEdge) {
  testing::Gen g(63);
  for (int c = 0; c < 40; ++c) {
    const Region r = g.region(2, 4, 9);
    const WeightField f(r, g.weights(r, 0.0, 2.0));
    const VertexSet s = single(r, r.coords(g.vertex(r))), t = single(r, r.coords(g.vertex(r)));
    const EdgeId e = g.edge(r);
    const double base = passage_time(f, s, t).time;
    EXPECT_GE(passage_time(f.with_weight(e, f[e] + g.real(0.0, 3.0)), s, t).time, base - 1e-12);
    EXPECT_LE(passage_time(f.with_weight(e, f[e] * g.real(0.0, 1.0)), s, t).time, base + 1e-12);
  }
}

TEST(Dijkstra, LimitAndPeek) {
  const Region r = Region::cube(2, 3);
  const auto f = sample_configuration(r, DistributionSpec::point_mass(1.0), 1);
  Dijkstra dj(r, f.values());
  dj.seed(r.index(c2(0, 0)), 0.0);
  std::size_t n = 0;
  while (dj.settle_next(2.0) != kNoVertex) ++n;
  EXPECT_EQ(n, 13u);  // L1 ball of radius 2
  EXPECT_EQ(dj.peek(), 3.0);
  EXPECT_FALSE(dj.exhausted());
  while (dj.settle_next() != kNoVertex) {
  }
  EXPECT_TRUE(dj.exhausted());
  EXPECT_EQ(dj.settle_order().size(), r.num_vertices());
  EXPECT_THROW(dj.seed(0, 0.0), DomainError);
}

TEST(Dijkstra, InitialLabels) {
  const Region r = Region::cube(2, 3);
  const auto f = sample_configuration(r, DistributionSpec::point_mass(1.0), 1);
  Dijkstra dj(r, f.values());
  dj.seed(r.index(c2(-3, 0)), 0.5);
  dj.seed(r.index(c2(3, 0)), 2.0);
  while (dj.settle_next() != kNoVertex) {
  }
  EXPECT_EQ(dj.dist(r.index(c2(0, 0))), 3.5);
  EXPECT_EQ(dj.dist(r.index(c2(2, 0))), 3.0);
  EXPECT_THROW(dj.seed(0, -1.0), DomainError);
}

// ---------------------------------------------------------------------------

TEST(Named, PointMassTimesEqualN) {
  const long n = 12;
  const auto f = sample_configuration(line_window(2, n, 3, 6), DistributionSpec::point_mass(1.0), 1);
  EXPECT_EQ(a_0n(f, n).time, n);
  EXPECT_EQ(b_0n(f, n).time, n);
  EXPECT_EQ(phi(f, 0, n).time, n);
  EXPECT_EQ(s_0n(f, n, 2).time, n);
}

TEST(Named, PathClassContainment) {
  testing::Gen g(64);
  const long n = 16;
  const Region r = line_window(2, n, 8, 24);
  const int h = face_cube_half_width(n, 0.25);
  for (int c = 0; c < 20; ++c) {
    const auto f = sample_configuration(r, c % 2 ? DistributionSpec::exponential(1.0)
                                                 : DistributionSpec::bernoulli(0.0, 1.0, 0.3),
                                        g.u64());
    const double a = a_0n(f, n).time;
    EXPECT_LE(b_0n(f, n).time, a + 1e-12);
    EXPECT_LE(s_0n(f, n, h).time, a + 1e-12);
    const auto p = phi(f, 0, n);
    for (VertexId v : p.path) {
      EXPECT_GE(r.coord(v, 0), 0);
      EXPECT_LE(r.coord(v, 0), n);
    }
  }
}

TEST(Named, CrossingInequality) {
  testing::Gen g(65);
  const long n = 8;
  const Region r = line_window(2, 4 * n, 8, 32);
  for (int c = 0; c < 20; ++c) {
    const auto f = sample_configuration(r, DistributionSpec::exponential(1.0), g.u64());
    const auto cc = crossing_check(f, n, face_cube_half_width(n, 0.25));
    EXPECT_TRUE(cc.holds) << cc.phi_sum << " > " << cc.s;
    EXPECT_NEAR(cc.phi_sum, cc.phi[0] + cc.phi[1] + cc.phi[2] + cc.phi[3], 1e-12);
  }
}

TEST(Named, FaceCubeHalfWidth) {
  EXPECT_EQ(face_cube_half_width(16, 0.25), 2);  // ceil(3.58) / 2
  EXPECT_EQ(face_cube_half_width(64, 0.25), 3);  // ceil(5.94) / 2
  const Region r = line_window(3, 4, 1, 3);
  EXPECT_EQ(face_cube(r, 4, 1).size(), 9u);
  EXPECT_EQ(hyperplane(r, 0).size(), 49u);
  EXPECT_EQ(slab(r, 0, 1).size(), 98u);
  EXPECT_THROW(hyperplane(r, 9), DomainError);
}

TEST(Named, Sandwich) {
  testing::Gen g(66);
  const long n = 16;
  const Region r = line_window(2, n, 12, 12);
  const BoxPair boxes = box_pair(r, n, 2);
  const auto pm = sandwich_check(sample_configuration(r, DistributionSpec::point_mass(1.0), 1), boxes, n);
  EXPECT_EQ(pm.box_time, n - 4.0);
  EXPECT_EQ(pm.point_time, static_cast<double>(n));
  EXPECT_EQ(pm.box_weight, 80.0);
  EXPECT_TRUE(pm.holds());
  for (int c = 0; c < 20; ++c) {
    const auto s = sandwich_check(sample_configuration(r, g.distribution(), g.u64()), boxes, n);
    EXPECT_TRUE(s.holds());
  }
  const BoxPair overlapping = box_pair(r, 3, 2);
  const auto o = sandwich_check(sample_configuration(r, DistributionSpec::exponential(1.0), 2), overlapping, 3);
  EXPECT_EQ(o.box_time, 0.0);
  EXPECT_TRUE(o.holds());
}

TEST(Named, TransverseSensitivityPointMass) {
  const auto s = transverse_sensitivity(DistributionSpec::point_mass(1.0), 1, 2, 8, 2, 4, 1);
  EXPECT_FALSE(s.flagged);
  EXPECT_EQ(s.phi_narrow, 8.0);
  EXPECT_EQ(s.s_wide, 8.0);
}

TEST(Windows, CapacityErrorNamesN) {
  try {
    line_window(2, 1000, 1000, 4000, 1'000'000);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("n = 1000"), std::string::npos);
  }
  BoxGeometry geo;
  geo.half_width = 40;
  EXPECT_THROW(geo.window(), ConfigError);
}

// ---------------------------------------------------------------------------

TEST(Balls, PointMassGraphDistanceFromCube) {
  const Region r = Region::cube(2, 10);
  const auto f = sample_configuration(r, DistributionSpec::point_mass(1.0), 1);
  const auto tf = tau_transform(f, default_tau(32));
  const VertexSet src = box(c2(0, 0), 1, r);
  const auto seq = ball_growth(tf, src, single(r, c2(8, 0)), 5);
  EXPECT_EQ(seq.status(), BallStatus::KMaxReached);
  EXPECT_FALSE(seq.k_star().has_value());
  EXPECT_EQ(seq.limit(), 5);
  for (int k = 0; k <= 5; ++k) {
    const VertexSet b = seq.ball(k);
    for (std::size_t v = 0; v < r.num_vertices(); ++v) {
      const Coord c = r.coords(static_cast<VertexId>(v));
      const int d = std::max(0, std::abs(c[0]) - 1) + std::max(0, std::abs(c[1]) - 1);
      EXPECT_EQ(b.contains(static_cast<VertexId>(v)), d <= k);
    }
  }
  EXPECT_THROW(seq.ball(6), DomainError);
}

TEST(Balls, HitAndTruncation) {
  const Region r = Region::cube(2, 6);
  const auto f = sample_configuration(r, DistributionSpec::point_mass(1.0), 1);
  const auto tf = tau_transform(f, default_tau(32));
  const auto hit = ball_growth(tf, single(r, c2(0, 0)), single(r, c2(3, 0)), 20);
  EXPECT_EQ(hit.status(), BallStatus::Hit);
  EXPECT_EQ(hit.k_star(), std::optional<int>(3));
  EXPECT_EQ(hit.target_time(), 3.0);
  EXPECT_EQ(hit.optimal_path().size(), 4u);
  const auto trunc = ball_growth(tf, single(r, c2(0, 0)), single(r, c2(6, 6)), 11);
  EXPECT_EQ(trunc.status(), BallStatus::WindowTruncated);
  EXPECT_TRUE(trunc.touches_face());
}

TEST(Balls, SampledFieldChecks) {
  testing::Gen g(67);
  BoxGeometry geo{2, 16, 2, 24, 24};
  const Region r = geo.window();
  const BoxPair boxes = geo.boxes(r);
  const TauParams p = default_tau(16);
  for (int c = 0; c < 15; ++c) {
    const auto f = sample_configuration(r, DistributionSpec::exponential(1.0), g.u64());
    const auto tf = tau_transform(f, p);
    const auto seq = ball_growth(tf, boxes.source, boxes.target, 200);
    ASSERT_EQ(seq.status(), BallStatus::Hit);
    const auto inv = check_ball_invariants(seq);
    EXPECT_TRUE(inv.all());
    EXPECT_EQ(inv.checked_k, seq.limit());
    EXPECT_TRUE(verify_lemma5(seq, p.threshold()).holds);
    const int ks = *seq.k_star();
    EXPECT_NEAR(seq.target_time(), passage_time(tf, boxes.source, boxes.target).time, 1e-12);
    for (int k = 0; k < ks; ++k) {
      const auto l2 = verify_lemma2(seq, tf, boxes.target, k);
      if (l2.skipped) continue;
      EXPECT_TRUE(l2.identity) << "k=" << k << " residual " << l2.residual;
      EXPECT_TRUE(l2.vertex_bounds);
    }
    EXPECT_TRUE(verify_lemma2(seq, tf, boxes.target, ks).skipped);
    EXPECT_TRUE(verify_lemma7(seq, tf, boxes.target, ks).holds);
    EXPECT_TRUE(verify_lemma7(seq, tf, boxes.target, ks + 3).holds);
    if (ks > 0) {
      EXPECT_TRUE(verify_lemma7(seq, tf, boxes.target, ks - 1).skipped);
    }
    EXPECT_TRUE(verify_lemma3(tf, passage_time(tf, boxes.source, boxes.target)).holds);
    EXPECT_TRUE(verify_lemma6(tf, boxes.source, boxes.target).holds);
  }
}

TEST(Balls, ZeroWeightClosureAtZero) {
  // zero-weight edges pull extra vertices into B(0)
  const Region r = Region::cube(2, 8);
  std::vector<double> w(r.num_edges(), 1.0);
  w[*r.find_edge(r.index(c2(0, 0)), r.index(c2(1, 0)))] = 0.0;
  const TauField tf(r, w, std::vector<TauRule>(r.num_edges(), TauRule::Mid), default_tau(32));
  const VertexSet src = single(r, c2(0, 0)), tgt = single(r, c2(5, 0));
  const auto seq = ball_growth(tf, src, tgt, 20);
  EXPECT_EQ(seq.ball(0).size(), 2u);
  const auto l2 = verify_lemma2(seq, tf, tgt, 0);
  EXPECT_TRUE(l2.identity);
  EXPECT_EQ(l2.from_ball, l2.total);
}

TEST(Balls, PointMassPathStaysInBall) {
  const Region r = Region::cube(2, 8);
  const auto tf = tau_transform(sample_configuration(r, DistributionSpec::point_mass(1.0), 1), default_tau(32));
  const VertexSet src = single(r, c2(0, 0)), tgt = single(r, c2(4, 2));
  const auto seq = ball_growth(tf, src, tgt, 30);
  const int L = 6;
  EXPECT_EQ(seq.k_star(), std::optional<int>(L));
  EXPECT_TRUE(verify_lemma7(seq, tf, tgt, L).holds);
  EXPECT_TRUE(verify_lemma7(seq, tf, tgt, L - 1).skipped);
  const auto l3 = verify_lemma3(tf, passage_time(tf, src, tgt));
  EXPECT_TRUE(l3.holds);
  EXPECT_EQ(l3.value, 1.0);
}

TEST(Balls, HeavyTailMaxEdge) {
  testing::Gen g(68);
  BoxGeometry geo{2, 16, 2, 16, 16};
  const Region r = geo.window();
  const BoxPair boxes = geo.boxes(r);
  for (int c = 0; c < 20; ++c) {
    const auto tf = tau_transform(sample_configuration(r, DistributionSpec::pareto(2.5, 1.0), g.u64()),
                                  default_tau(16));
    EXPECT_TRUE(verify_lemma3(tf, passage_time(tf, boxes.source, boxes.target)).holds);
  }
}

// ---------------------------------------------------------------------------

TEST(Shell, OriginThetaThree) {
  const Region r = Region::cube(2, 10);
  const auto s = shell(single(r, c2(0, 0)), 3.0);
  std::size_t brute = 0;
  for (int x = -10; x <= 10; ++x)
    for (int y = -10; y <= 10; ++y) {
      const double d = std::hypot(x, y);
      if (d > 6.0 && d < 7.0) ++brute;
    }
  EXPECT_EQ(brute, 32u);
  EXPECT_EQ(s.inner.size(), 32u);
  EXPECT_TRUE(s.inner.subset_of(s.plus));
}

TEST(Shell, InclusionAndEdgeCases) {
  testing::Gen g(69);
  for (int c = 0; c < 20; ++c) {
    const Region r = g.region(2, 4, 14);
    VertexSet gamma = g.subset(r, 0.05);
    if (gamma.empty()) gamma.insert(g.vertex(r));
    const auto s = shell(gamma, g.real(0.5, 3.0));
    EXPECT_TRUE(s.inner.subset_of(s.plus));
    EXPECT_FALSE(s.plus.intersects(gamma));
  }
  const Region r = Region::cube(2, 3);
  EXPECT_TRUE(shell(VertexSet::all(r), 1.0).inner.empty());
  EXPECT_THROW(shell(VertexSet(r), 1.0), DomainError);
  EXPECT_EQ(shell(single(r, c2(0, 0)), 16, 0.25).plus.size(), shell(single(r, c2(0, 0)), tau_threshold(16, 0.25)).plus.size());
}

}  // namespace
}  // namespace fpp
