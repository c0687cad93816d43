#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fpp/errors.hpp"
#include "fpp/martingale.hpp"
#include "generators.hpp"

namespace fpp {
namespace {

MartingaleParams small_params(int replicas = 16) {
  MartingaleParams p;
  p.tau.n = 8;
  p.geometry = BoxGeometry{2, 8, 1, 32, 32};
  p.replicas = replicas;
  return p;
}

TEST(FrozenRegion, EmptyBeforeStartAndGrowing) {
  const auto p = small_params();
  const Region r = p.geometry.window();
  const auto f = sample_configuration(r, DistributionSpec::exponential(1.0), 5);
  const TauField tf = tau_transform(f, p.tau);
  const VertexSet src = p.geometry.boxes(r).source;
  EXPECT_TRUE(frozen_region(tf, src, -1).empty());
  VertexSet prev = frozen_region(tf, src, 0);
  EXPECT_TRUE(src.subset_of(prev));
  for (int k = 1; k <= 4; ++k) {
    const VertexSet cur = frozen_region(tf, src, k);
    EXPECT_TRUE(prev.subset_of(cur));
    EXPECT_TRUE(tau_ball(tf, src, k).subset_of(cur));
    prev = cur;
  }
}

TEST(FrozenRegion, PointMassCollar) {
  // B(0) is the single source vertex; the collar radius is theta + 1 around
  // it and its four neighbours.
  auto p = small_params();
  p.geometry.half_width = 0;
  const Region r = p.geometry.window();
  const TauField tf = tau_transform(sample_configuration(r, DistributionSpec::point_mass(1.0), 1), p.tau);
  const VertexSet src = p.geometry.boxes(r).source;
  const VertexSet fr = frozen_region(tf, src, 0);
  const double radius = std::max(p.tau.threshold(), locality_radius(p.tau.threshold(), 2)) + 1.0;
  std::size_t brute = 0;
  for (std::size_t v = 0; v < r.num_vertices(); ++v) {
    const Coord c = r.coords(static_cast<VertexId>(v));
    bool in = false;
    for (const Coord& q : {Coord{0, 0, 0, 0}, Coord{1, 0, 0, 0}, Coord{-1, 0, 0, 0}, Coord{0, 1, 0, 0},
                           Coord{0, -1, 0, 0}})
      in = in || std::hypot(c[0] - q[0], c[1] - q[1]) <= radius;
    brute += in;
    EXPECT_EQ(fr.contains(static_cast<VertexId>(v)), in);
  }
  EXPECT_EQ(fr.size(), brute);
}

TEST(FrozenRegion, ReachingTheFaceThrows) {
  auto p = small_params();
  p.geometry.pad = 2;
  p.geometry.transverse = 3;
  const Region r = p.geometry.window();
  const TauField tf = tau_transform(sample_configuration(r, DistributionSpec::point_mass(1.0), 1), p.tau);
  EXPECT_THROW(frozen_region(tf, p.geometry.boxes(r).source, 0), PreconditionError);
}

TEST(Martingale, PointMassHasNoIncrements) {
  const auto p = small_params(4);
  const auto f = sample_configuration(p.geometry.window(), DistributionSpec::point_mass(1.0), 1);
  const auto tr = martingale_trace(f, 8, p);
  EXPECT_EQ(tr.t_tau, 6.0);
  EXPECT_EQ(tr.k_star, std::optional<int>(6));
  ASSERT_EQ(tr.ks.size(), 10u);
  EXPECT_EQ(tr.ks.front(), -1);
  for (const auto& e : tr.estimates) {
    EXPECT_EQ(e.mean, 6.0);
    EXPECT_EQ(e.std_error, 0.0);
  }
  for (double d : tr.differences) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(tr.terminal_residual, std::optional<double>(0.0));
  EXPECT_EQ(tr.max_abs_difference, 0.0);
}

TEST(Martingale, TraceStructure) {
  testing::Gen g(71);
  const auto p = small_params(12);
  const Region r = p.geometry.window();
  for (int c = 0; c < 3; ++c) {
    const auto f = sample_configuration(r, DistributionSpec::exponential(1.0), g.u64());
    const auto tr = martingale_trace(f, 6, p);
    EXPECT_TRUE(tr.nested);
    EXPECT_LT(tr.telescoping_residual, 1e-9);
    ASSERT_EQ(tr.differences.size() + 1, tr.estimates.size());
    for (std::size_t i = 0; i + 1 < tr.estimates.size(); ++i) {
      EXPECT_LE(tr.estimates[i].frozen_vertices, tr.estimates[i + 1].frozen_vertices);
      EXPECT_DOUBLE_EQ(tr.differences[i], tr.estimates[i + 1].mean - tr.estimates[i].mean);
    }
    EXPECT_EQ(tr.grand_mean, tr.estimates.front().mean);
    EXPECT_EQ(tr.estimates.front().frozen_vertices, 0u);
    EXPECT_NEAR(tr.shape_constant * std::pow(std::log(8.0), 2.5), tr.max_abs_difference, 1e-12);
  }
}

TEST(Martingale, CollapsesOnceTargetIsReached) {
  testing::Gen g(72);
  const auto p = small_params(8);
  const Region r = p.geometry.window();
  for (int c = 0; c < 5; ++c) {
    const auto f = sample_configuration(r, DistributionSpec::exponential(1.0), g.u64());
    const auto tr = martingale_trace(f, 7, p);
    ASSERT_TRUE(tr.k_star.has_value());
    ASSERT_TRUE(tr.terminal_residual.has_value());
    EXPECT_LT(*tr.terminal_residual, 1e-9);
    for (std::size_t i = 0; i < tr.ks.size(); ++i) {
      if (tr.ks[i] < *tr.k_star) continue;
      EXPECT_NEAR(tr.estimates[i].mean, tr.t_tau, 1e-9) << "k=" << tr.ks[i];
      EXPECT_LT(tr.estimates[i].std_error, 1e-12);
    }
  }
}

TEST(Martingale, StartMatchesGrandMean) {
  const auto p = small_params(200);
  const Region r = p.geometry.window();
  const auto f = sample_configuration(r, DistributionSpec::exponential(1.0), 73);
  const Estimate start = conditional_mean(f, -1, p);
  const Estimate gm = grand_mean(DistributionSpec::exponential(1.0), p, 200, 74);
  EXPECT_LT(std::abs(start.mean - gm.mean), 3.0 * std::hypot(start.std_error, gm.std_error));
  EXPECT_GT(gm.std_error, 0.0);
}

TEST(Martingale, DeterministicAcrossThreads) {
  auto p = small_params(6);
  const auto f = sample_configuration(p.geometry.window(), DistributionSpec::exponential(1.0), 75);
  const Estimate a = conditional_mean(f, 2, p);
  p.threads = 3;
  const Estimate b = conditional_mean(f, 2, p);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Martingale, Errors) {
  const auto p = small_params(1);
  const auto f = sample_configuration(p.geometry.window(), DistributionSpec::exponential(1.0), 1);
  EXPECT_THROW(conditional_mean(f, 0, p), DomainError);
  EXPECT_THROW(martingale_trace(f, -1, small_params()), DomainError);
  EXPECT_THROW(grand_mean(DistributionSpec::exponential(1.0), small_params(), 1, 1), DomainError);
}

TEST(Azuma, Curve) {
  const std::vector<double> xs{0.0, 0.5, 1.0, 2.0, 4.0};
  const auto y = azuma_curve(1.5, 7, xs);
  EXPECT_EQ(y[0], 2.0);
  EXPECT_NEAR(y[2], 2.0 * std::exp(-1.0 / (2.0 * 7 * 2.25)), 1e-15);
  for (std::size_t i = 1; i < y.size(); ++i) EXPECT_LT(y[i], y[i - 1]);
  // scaling c and x together leaves the bound unchanged
  const auto z = azuma_curve(3.0, 7, {0.0, 1.0, 2.0, 4.0, 8.0});
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(z[i], y[i], 1e-15);
  // halving the bound: new value is old^4 / 8
  const auto h = azuma_curve(0.75, 7, {1.0});
  EXPECT_NEAR(h[0], std::pow(y[2], 4) / 8.0, 1e-14);
  EXPECT_THROW(azuma_curve(0.0, 3, xs), DomainError);
  EXPECT_THROW(azuma_curve(1.0, 0, xs), DomainError);
}

}  // namespace
}  // namespace fpp
