#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fpp/clusters.hpp"
#include "fpp/errors.hpp"
#include "fpp/tau.hpp"
#include "generators.hpp"

namespace fpp {
namespace {

Coord c2(int x, int y) { return Coord{x, y, 0, 0}; }

EdgeId edge_between(const Region& r, const Coord& a, const Coord& b) {
  return *r.find_edge(r.index(a), r.index(b));
}

TauParams params_for(long n, double eps = 0.05, double M = 6.0) {
  TauParams p;
  p.n = n;
  p.epsilon = eps;
  p.M = M;
  return p;
}

// Weights from {fast, mid, slow} so both cluster kinds appear at small sizes.
WeightField mixed_field(testing::Gen& g, const Region& r, double p_fast, double p_slow) {
  std::vector<double> w(r.num_edges());
  for (auto& x : w) {
    const double u = g.real(0.0, 1.0);
    x = u < p_fast ? g.real(0.0, 0.04) : (u < p_fast + p_slow ? g.real(6.5, 20.0) : g.real(0.05, 6.0));
  }
  return WeightField(r, w);
}

TEST(TauParams, Validation) {
  EXPECT_NO_THROW(TauParams{}.validate());
  EXPECT_THROW((TauParams{6.0, 6.0, 32, 0.25}.validate()), ConfigError);
  EXPECT_THROW((TauParams{0.0, 6.0, 32, 0.25}.validate()), ConfigError);
  EXPECT_THROW((TauParams{0.05, 6.0, 1, 0.25}.validate()), ConfigError);
  EXPECT_THROW((TauParams{0.05, 6.0, 32, 1.0}.validate()), ConfigError);
  EXPECT_THROW((TauParams{0.05, 6.0, 32, 0.0}.validate()), ConfigError);
}

TEST(Threshold, Values) {
  EXPECT_NEAR(tau_threshold(16, 0.25), 3.5777238448251967, 1e-12);
  EXPECT_NEAR(tau_threshold(32, 0.25), 4.728727977555314, 1e-12);
  EXPECT_NEAR(tau_threshold(64, 0.25), 5.939103439123145, 1e-12);
  EXPECT_NEAR(locality_radius(tau_threshold(64, 0.25), 2), 5.656854249492381, 1e-12);
  EXPECT_EQ(locality_radius(0.63, 2), 0.0);
  EXPECT_THROW(tau_threshold(1, 0.25), DomainError);
}

TEST(EdgeDistance, NearestEndpoints) {
  const Region r = Region::cube(2, 5);
  const EdgeId a = edge_between(r, c2(0, 0), c2(1, 0));
  EXPECT_EQ(edge_distance(r, a, a), 0.0);
  EXPECT_EQ(edge_distance(r, a, edge_between(r, c2(1, 0), c2(1, 1))), 0.0);
  EXPECT_EQ(edge_distance(r, a, edge_between(r, c2(4, 0), c2(5, 0))), 3.0);
  EXPECT_NEAR(edge_distance(r, a, edge_between(r, c2(2, 1), c2(2, 2))), std::sqrt(2.0), 1e-15);
}

TEST(TauTransform, PointMassAllMid) {
  const auto f = sample_configuration(Region::cube(2, 5), DistributionSpec::point_mass(1.0), 3);
  const auto tf = tau_transform(f, params_for(32, 0.5, 2.0));
  EXPECT_EQ(tf.count(TauRule::Mid), f.region().num_edges());
  EXPECT_TRUE(tf.identical_to_weights());
  for (std::size_t e = 0; e < f.region().num_edges(); ++e) EXPECT_EQ(tf[static_cast<EdgeId>(e)], 1.0);
}

TEST(TauTransform, SmallCappedPathAndKeptEdge) {
  const TauParams p = params_for(32);
  const int len = static_cast<int>(std::ceil(p.threshold())) + 2;  // vertices on the path
  const Region r(2, c2(0, 0), c2(len + 4, 6));
  std::vector<double> w(r.num_edges(), 1.0);
  std::vector<EdgeId> path;
  for (int x = 0; x + 1 < len; ++x) path.push_back(edge_between(r, c2(x, 1), c2(x + 1, 1)));
  for (EdgeId e : path) w[e] = 0.01;
  const EdgeId lone = edge_between(r, c2(2, 5), c2(2, 6));
  w[lone] = 0.02;
  const auto tf = tau_transform(WeightField(r, w), p);
  for (EdgeId e : path) {
    EXPECT_EQ(tf.rule(e), TauRule::SmallCapped);
    EXPECT_EQ(tf[e], 1.0);
  }
  EXPECT_EQ(tf.rule(lone), TauRule::SmallKept);
  EXPECT_EQ(tf[lone], 0.02);
  EXPECT_FALSE(tf.identical_to_weights());
}

TEST(TauTransform, SmallClusterAtThresholdIsKept) {
  // floor(theta) vertices is not "more than theta"
  const TauParams p = params_for(64);
  const int verts = static_cast<int>(std::floor(p.threshold()));
  const Region r(2, c2(0, 0), c2(verts + 2, 2));
  std::vector<double> w(r.num_edges(), 1.0);
  for (int x = 0; x + 1 < verts; ++x) w[edge_between(r, c2(x, 1), c2(x + 1, 1))] = 0.01;
  const auto tf = tau_transform(WeightField(r, w), p);
  EXPECT_EQ(tf.count(TauRule::SmallKept), static_cast<std::size_t>(verts - 1));
  EXPECT_EQ(tf.count(TauRule::SmallCapped), 0u);
}

TEST(TauTransform, LargeKeptForTwoVertexCluster) {
  const TauParams p = params_for(64);
  ASSERT_GT(p.threshold(), 2.0);
  const Region r = Region::cube(2, 4);
  std::vector<double> w(r.num_edges(), 1.0);
  const EdgeId e = edge_between(r, c2(0, 0), c2(1, 0));
  w[e] = p.M + 1.0;
  const auto tf = tau_transform(WeightField(r, w), p);
  EXPECT_EQ(tf.rule(e), TauRule::LargeKept);
  EXPECT_EQ(tf[e], p.M + 1.0);
}

TEST(TauTransform, LargeCappedInsideBigOpenCluster) {
  const TauParams p = params_for(64);
  const Region r(2, c2(-2, -3), c2(12, 3));
  std::vector<double> w(r.num_edges(), 1.0);
  std::vector<EdgeId> heavy;
  for (int x = 0; x < 6; ++x) heavy.push_back(edge_between(r, c2(x, 0), c2(x + 1, 0)));  // 7 open vertices
  for (EdgeId e : heavy) w[e] = 10.0;
  const auto tf = tau_transform(WeightField(r, w), p);
  for (EdgeId e : heavy) {
    EXPECT_EQ(tf.rule(e), TauRule::LargeCapped);
    EXPECT_EQ(tf[e], 1.0);
  }
}

TEST(TauTransform, RuleInvariantsAndLocalAgreement) {
  testing::Gen g(51);
  for (int c = 0; c < 40; ++c) {
    const Region r = g.region(2, 4, 14);
    const WeightField f = mixed_field(g, r, g.real(0.1, 0.45), g.real(0.05, 0.3));
    const TauParams p = params_for(g.integer(4, 200));
    const auto tf = tau_transform(f, p);
    for (std::size_t i = 0; i < r.num_edges(); ++i) {
      const auto e = static_cast<EdgeId>(i);
      const double t = f[e];
      const TauRule rule = tf.rule(e);
      EXPECT_TRUE(tf[e] == t || tf[e] == 1.0);
      EXPECT_LE(tf[e], std::max(t, 1.0));
      switch (rule) {
        case TauRule::Mid: EXPECT_TRUE(t >= p.epsilon && t <= p.M && tf[e] == t); break;
        case TauRule::SmallKept: EXPECT_TRUE(t < p.epsilon && tf[e] == t); break;
        case TauRule::SmallCapped: EXPECT_TRUE(t < p.epsilon && tf[e] == 1.0); break;
        case TauRule::LargeKept: EXPECT_TRUE(t > p.M && tf[e] == t); break;
        case TauRule::LargeCapped: EXPECT_TRUE(t > p.M && tf[e] == 1.0); break;
      }
      EXPECT_EQ(tau_of_edge(f, e, p), std::make_pair(tf[e], rule));
    }
  }
}

TEST(TauTransform, SmallClustersLeaveWeightsUntouched) {
  testing::Gen g(52);
  for (int c = 0; c < 30; ++c) {
    const Region r = g.region(2, 4, 12);
    const WeightField f = mixed_field(g, r, 0.05, 0.03);
    const TauParams p = params_for(128);
    const auto small = epsilon_clusters(f, p.epsilon);
    const auto open = open_ld_clusters(f, p.M);
    const bool all_small =
        small.larger_than(p.threshold()).empty() && open.larger_than(p.threshold()).empty();
    const auto tf = tau_transform(f, p);
    if (all_small) {
      EXPECT_TRUE(tf.identical_to_weights());
      EXPECT_TRUE(std::equal(tf.values().begin(), tf.values().end(), f.values().begin()));
    }
  }
}

TEST(TauTransform, LargerNOnlyUncaps) {
  testing::Gen g(53);
  for (int c = 0; c < 30; ++c) {
    const Region r = g.region(2, 6, 14);
    const WeightField f = mixed_field(g, r, 0.4, 0.25);
    const auto lo = tau_transform(f, params_for(8));
    const auto hi = tau_transform(f, params_for(1000));
    for (std::size_t i = 0; i < r.num_edges(); ++i) {
      const auto e = static_cast<EdgeId>(i);
      const bool capped_lo = lo.rule(e) == TauRule::SmallCapped || lo.rule(e) == TauRule::LargeCapped;
      const bool capped_hi = hi.rule(e) == TauRule::SmallCapped || hi.rule(e) == TauRule::LargeCapped;
      EXPECT_FALSE(capped_hi && !capped_lo);
    }
  }
}

TEST(TauTransform, RejectsBadParams) {
  const auto f = sample_configuration(Region::cube(2, 2), DistributionSpec::exponential(1.0), 1);
  EXPECT_THROW(tau_transform(f, params_for(32, 7.0, 6.0)), ConfigError);
}

TEST(Locality, PointMassAlwaysHolds) {
  const Region r = Region::cube(2, 12);
  const auto f = sample_configuration(r, DistributionSpec::point_mass(1.0), 3);
  const TauParams p = params_for(64);
  const EdgeId e = edge_between(r, c2(0, 0), c2(1, 0));
  const auto res = tau_locality_check(f, e, p, p.threshold());
  EXPECT_TRUE(res.holds);
  EXPECT_EQ(res.rounds, 20);
  EXPECT_EQ(res.first_change, -1);
  EXPECT_GT(res.resampled_edges, 0u);
}

TEST(Locality, SampledFieldsHold) {
  testing::Gen g(54);
  const Region r = Region::cube(2, 12);
  const TauParams p = params_for(64);
  for (int c = 0; c < 20; ++c) {
    const auto f = sample_configuration(r, DistributionSpec::exponential(1.0), g.u64());
    const EdgeId e = r.edge_index(r.index(c2(g.integer(-2, 2), g.integer(-2, 2))), g.integer(0, 1));
    EXPECT_TRUE(tau_locality_check(f, e, p, p.threshold(), 5).holds);
  }
}

TEST(Locality, ClusterHeavyFieldsHold) {
  // Bernoulli fields with many fast edges grow clusters up to the threshold.
  testing::Gen g(55);
  const Region r = Region::cube(2, 12);
  const TauParams p = params_for(64);
  for (int c = 0; c < 20; ++c) {
    const auto f = sample_configuration(r, DistributionSpec::bernoulli(0.01, 1.0, 0.4), g.u64());
    const EdgeId e = r.edge_index(r.index(c2(0, 0)), 0);
    EXPECT_TRUE(tau_locality_check(f, e, p, p.threshold(), 5).holds);
  }
}

TEST(Locality, PerturbationInsideRadiusCanChangeTau) {
  const TauParams p = params_for(64);  // threshold 5.94
  const Region r = Region::cube(2, 12);
  std::vector<double> w(r.num_edges(), 1.0);
  // five-vertex fast cluster, kept
  w[edge_between(r, c2(0, 0), c2(1, 0))] = 0.01;
  w[edge_between(r, c2(1, 0), c2(2, 0))] = 0.01;
  w[edge_between(r, c2(2, 0), c2(2, 1))] = 0.01;
  w[edge_between(r, c2(2, 1), c2(1, 1))] = 0.01;
  const WeightField f(r, w);
  const EdgeId e = edge_between(r, c2(0, 0), c2(1, 0));
  EXPECT_EQ(tau_of_edge(f, e, p).second, TauRule::SmallKept);
  const EdgeId near = edge_between(r, c2(0, 1), c2(1, 1));
  ASSERT_LE(edge_distance(r, e, near), p.threshold() / 2);
  const auto g = f.with_weight(near, 0.01);
  EXPECT_EQ(tau_of_edge(g, e, p), std::make_pair(1.0, TauRule::SmallCapped));
}

TEST(Locality, NeedsMargin) {
  const Region r = Region::cube(2, 6);
  const auto f = sample_configuration(r, DistributionSpec::exponential(1.0), 1);
  const TauParams p = params_for(64);
  EXPECT_THROW(tau_locality_check(f, r.edge_index(r.index(c2(0, 0)), 0), p, p.threshold()), PreconditionError);
  const Region big = Region::cube(2, 9);
  const auto g = sample_configuration(big, DistributionSpec::exponential(1.0), 1);
  EXPECT_NO_THROW(tau_locality_check(g, big.edge_index(big.index(c2(0, 0)), 0), p, p.threshold(), 1));
  EXPECT_THROW(tau_locality_check(g, big.edge_index(big.index(c2(0, 0)), 0), p, p.threshold(), 0), DomainError);
}

}  // namespace
}  // namespace fpp
