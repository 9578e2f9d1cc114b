#include <gtest/gtest.h>

#include <cmath>

#include "ckern/random.hpp"
#include "ckern/vdm.hpp"

using namespace ckern;

namespace {

double hs_identity_residual(const ConnectionGraph& g, double t) {
  const BlockMatrix h = dense_kernel(g, t);
  const VdmEmbedding v = vdm_embed(g, t, vdm_full_rank(g));
  double worst = 0.0;
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    for (std::size_t y = 0; y < g.vertex_count(); ++y) {
      worst = std::max(worst, std::abs(v.inner(x, y) - hs_norm2(h.block(x, y))));
    }
  }
  return worst;
}

}  // namespace

TEST(Vdm, HilbertSchmidtIdentityAtFullRank) {
  random::Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random::connected_graph(rng, 2 + trial % 9, 1 + trial % 3);
    for (double t : {0.3, 1.0, 4.0}) EXPECT_LE(hs_identity_residual(g, t), 1e-10) << "trial " << trial;
  }
}

TEST(Vdm, TimeZeroIdentityConnection) {
  ConnectionGraph g(3);
  g.add_vertex("u");
  g.add_vertex("v");
  g.add_edge(0, 1, 1.0, identity(3));
  const VdmEmbedding v = vdm_embed(g, 0.0, vdm_full_rank(g));
  EXPECT_NEAR(v.inner(0, 0), 3.0, 1e-12);
  EXPECT_NEAR(v.inner(1, 1), 3.0, 1e-12);
  EXPECT_NEAR(v.inner(0, 1), 0.0, 1e-12);
}

TEST(Vdm, CoordinateCountAndBottomPair) {
  random::Rng rng(52);
  const auto g = random::connected_graph(rng, 6, 2);
  for (std::size_t k : {1u, 3u, 12u}) {
    const VdmEmbedding v = vdm_embed(g, 0.7, k);
    EXPECT_EQ(v.coords.rows(), 6);
    EXPECT_EQ(static_cast<std::size_t>(v.coords.cols()), k * k);
  }
  EXPECT_GE(vdm_embed(g, 0.7, 1).coords.minCoeff(), 0.0);
}

TEST(Vdm, RankOutOfRange) {
  const auto g = cycle_graph(4, rotation(0.3));
  EXPECT_THROW(vdm_embed(g, 1.0, 0), precondition_error);
  EXPECT_THROW(vdm_embed(g, 1.0, 9), precondition_error);
  EXPECT_NO_THROW(vdm_embed(g, 1.0, 8));
  EXPECT_THROW(vdm_distance(g, 1.0, 0, 4, 8), precondition_error);
}

TEST(Vdm, TruncationIsMonotone) {
  random::Rng rng(53);
  const auto g = random::connected_graph(rng, 7, 2);
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    double prev = 0.0;
    for (std::size_t k = 1; k <= vdm_full_rank(g); ++k) {
      const double self = vdm_embed(g, 1.2, k).inner(x, x);
      EXPECT_GE(self, prev - 1e-15);
      prev = self;
    }
  }
}

TEST(VdmDistance, SelfAndSymmetry) {
  random::Rng rng(54);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random::connected_graph(rng, 3 + trial % 7, 1 + trial % 3);
    const std::size_t full = vdm_full_rank(g);
    for (std::size_t x = 0; x < g.vertex_count(); ++x) {
      EXPECT_EQ(vdm_distance(g, 0.9, x, x, full), 0.0);
      EXPECT_EQ(vdm_distance(g, 0.9, x, x, 1), 0.0);
      for (std::size_t y = 0; y < x; ++y) {
        EXPECT_EQ(vdm_distance(g, 0.9, x, y, full), vdm_distance(g, 0.9, y, x, full));
        EXPECT_EQ(vdm_distance(g, 0.9, x, y, 2), vdm_distance(g, 0.9, y, x, 2));
      }
    }
  }
}

TEST(VdmDistance, TwoRoutesAgree) {
  random::Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random::connected_graph(rng, 2 + trial % 9, 1 + trial % 3);
    const double t = 0.5 + 0.25 * (trial % 5);
    const BlockMatrix h = dense_kernel(g, t);
    const VdmEmbedding v = vdm_embed(g, t, vdm_full_rank(g));
    for (std::size_t x = 0; x < g.vertex_count(); ++x) {
      for (std::size_t y = 0; y < g.vertex_count(); ++y) {
        EXPECT_NEAR(vdm_distance_hs(h, x, y), v.distance(x, y), 1e-10);
      }
    }
  }
}

TEST(VdmDistance, TriangleInequality) {
  random::Rng rng(56);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random::connected_graph(rng, 4 + trial % 6, 1 + trial % 3);
    const BlockMatrix h = dense_kernel(g, 0.8);
    const std::size_t n = g.vertex_count();
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t z = 0; z < n; ++z) {
          EXPECT_LE(vdm_distance_hs(h, x, z), vdm_distance_hs(h, x, y) + vdm_distance_hs(h, y, z) + 1e-9);
        }
      }
    }
  }
}

TEST(VdmDistance, BalancedGraphMatchesScalarDiffusion) {
  // σ_uv = O_uᵀO_v makes every block an orthogonal multiple of the scalar
  // kernel entry, so ‖H(x,y)‖²_HS = d·h(x,y)².
  random::Rng rng(57);
  const auto g = random::balanced_graph(rng, 6, 3);
  const Matrix s = scalar_heat_kernel(g, 1.1);
  const BlockMatrix h = dense_kernel(g, 1.1);
  for (std::size_t x = 0; x < 6; ++x) {
    for (std::size_t y = 0; y < 6; ++y) {
      const auto xi = static_cast<Eigen::Index>(x), yi = static_cast<Eigen::Index>(y);
      const double want = std::sqrt(3.0 * (s(xi, xi) * s(xi, xi) + s(yi, yi) * s(yi, yi) - 2.0 * s(xi, yi) * s(xi, yi)));
      EXPECT_NEAR(vdm_distance_hs(h, x, y), want, 1e-7);
    }
  }
}
