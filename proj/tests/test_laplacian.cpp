#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <vector>

#include "ckern/laplacian.hpp"
#include "ckern/random.hpp"

using namespace ckern;

namespace {

ConnectionGraph single_edge(const Matrix& sigma, double w = 1.0) {
  ConnectionGraph g(static_cast<std::size_t>(sigma.rows()));
  g.add_vertex("u");
  g.add_vertex("v");
  g.add_edge(0, 1, w, sigma);
  return g;
}

Vector random_vector(random::Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = random::uniform(rng, -1.0, 1.0);
  return v;
}

}  // namespace

TEST(Adjacency, EdgelessIsZero) {
  ConnectionGraph g(2);
  g.add_vertex("a");
  g.add_vertex("b");
  EXPECT_EQ(adjacency(g).matrix(), Matrix::Zero(4, 4));
}

TEST(Adjacency, SingleRotatedEdge) {
  const auto a = adjacency(single_edge(rotation(0.6)));
  EXPECT_EQ(Matrix(a.block(0, 1)), rotation(0.6));
  EXPECT_LT(max_abs(Matrix(a.block(1, 0)) - rotation(-0.6)), 1e-16);
  EXPECT_EQ(Matrix(a.block(0, 0)), Matrix::Zero(2, 2));
}

TEST(Adjacency, IdentityTriangleIsScalarTimesIdentity) {
  const auto g = cycle_graph(3, identity(2));
  Matrix scalar = Matrix::Ones(3, 3) - identity(3);
  EXPECT_EQ(adjacency(g).matrix(), kron_product(scalar, identity(2)));
}

TEST(Degree, Examples) {
  EXPECT_EQ(degree_matrix(single_edge(identity(3))).matrix(), identity(6));
  ConnectionGraph star(2);
  for (const char* id : {"c", "a", "b", "d"}) star.add_vertex(id);
  for (std::size_t leaf = 1; leaf < 4; ++leaf) star.add_edge(0, leaf);
  EXPECT_EQ(Matrix(degree_matrix(star).block(0, 0)), 3.0 * identity(2));
  EXPECT_EQ(Matrix(degree_matrix(single_edge(identity(2), 2.5)).block(1, 1)), 2.5 * identity(2));
}

TEST(Laplacian, SignedEdge) {
  Matrix want(2, 2);
  want << 1, 1, 1, 1;
  EXPECT_EQ(laplacian(single_edge(Matrix::Constant(1, 1, -1.0))).matrix(), want);
}

TEST(Laplacian, IdentityConnectionIsScalarKronIdentity) {
  random::Rng rng(1);
  ConnectionGraph g = random::connected_graph(rng, 7, 1);
  ConnectionGraph lifted(3);
  for (const auto& id : g.vertex_ids()) lifted.add_vertex(id);
  for (const Edge& e : g.edges()) lifted.add_edge(e.u, e.v, e.weight, identity(3));
  ConnectionGraph scalar(1);
  for (const auto& id : g.vertex_ids()) scalar.add_vertex(id);
  for (const Edge& e : g.edges()) scalar.add_edge(e.u, e.v, e.weight);
  EXPECT_LT(max_abs(laplacian(lifted).matrix() - kron_product(laplacian(scalar).matrix(), identity(3))), 1e-15);
  // Row sums of the scalar Laplacian vanish.
  EXPECT_LT(max_abs(laplacian(scalar).matrix().rowwise().sum()), 1e-14);
}

TEST(Laplacian, SymmetricAndVertexActionAgrees) {
  random::Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random::connected_graph(rng, 2 + trial, 1 + trial % 3);
    const Matrix l = laplacian(g).matrix();
    const Matrix nl = normalized_laplacian(g).matrix();
    EXPECT_LT(max_abs(l - l.transpose()), 1e-12);
    EXPECT_LT(max_abs(nl - nl.transpose()), 1e-12);
    const Vector f = random_vector(rng, l.rows());
    EXPECT_LT(max_abs(Vector(l * f) - apply_laplacian(g, f)), 1e-12);
  }
}

TEST(Laplacian, QuadraticFormIsEdgeSum) {
  random::Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random::connected_graph(rng, 8, 3);
    const auto d = static_cast<Eigen::Index>(g.dim());
    const Vector f = random_vector(rng, static_cast<Eigen::Index>(g.vertex_count()) * d);
    double edge_sum = 0.0;
    for (const Edge& e : g.edges()) {
      edge_sum += e.weight * (f.segment(static_cast<Eigen::Index>(e.u) * d, d) -
                              e.sigma_uv * f.segment(static_cast<Eigen::Index>(e.v) * d, d))
                                 .squaredNorm();
    }
    const double form = f.dot(laplacian(g).matrix() * f);
    EXPECT_NEAR(form, edge_sum, 1e-10 * std::max(1.0, edge_sum));
  }
}

TEST(Laplacian, SpectraInUnitInterval) {
  random::Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = random::connected_graph(rng, 2 + trial % 10, 1 + trial % 4);
    const Spectrum s = sym_eig(normalized_laplacian(g).matrix());
    EXPECT_GE(s.values.minCoeff(), -1e-10);
    EXPECT_LE(s.values.maxCoeff(), 2.0 + 1e-10);
    EXPECT_GE(sym_eig(laplacian(g).matrix()).values.minCoeff(), -1e-10);
  }
}

TEST(Laplacian, ConsistentSpectrumRepeatsScalarSpectrum) {
  random::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const auto g = random::balanced_graph(rng, 9, d);
    ConnectionGraph scalar(1);
    for (const auto& id : g.vertex_ids()) scalar.add_vertex(id);
    for (const Edge& e : g.edges()) scalar.add_edge(e.u, e.v, e.weight);
    const Vector mu = sym_eig(normalized_laplacian(scalar).matrix()).values;
    std::vector<double> expected;
    for (Eigen::Index i = 0; i < mu.size(); ++i) expected.insert(expected.end(), d, mu(i));
    std::sort(expected.begin(), expected.end());
    const Vector got = sym_eig(normalized_laplacian(g).matrix()).values;
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(got(static_cast<Eigen::Index>(i)), expected[i], 1e-8);
  }
}

TEST(Laplacian, ZeroDegreeRejected) {
  ConnectionGraph g(1);
  g.add_vertex("a");
  g.add_vertex("b");
  g.add_vertex("lonely");
  g.add_edge(0, 1);
  EXPECT_THROW(normalized_laplacian(g), precondition_error);
  EXPECT_NO_THROW(laplacian(g));
}

TEST(Rayleigh, EigenvectorGivesEigenvalue) {
  random::Rng rng(6);
  const auto g = random::connected_graph(rng, 6, 2);
  const Spectrum s = sym_eig(normalized_laplacian(g).matrix());
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    EXPECT_NEAR(rayleigh(g, s.vectors.col(i)), s.values(i), 1e-12);
  }
}

TEST(Rayleigh, ConstantIsHarmonicForIdentityConnection) {
  const auto g = cycle_graph(7, identity(2));
  EXPECT_NEAR(rayleigh(g, Vector::Ones(14)), 0.0, 1e-15);
}

TEST(Rayleigh, BoundedOnRandomInputs) {
  random::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random::connected_graph(rng, 2 + trial % 9, 1 + trial % 3);
    const double r = rayleigh(g, random_vector(rng, static_cast<Eigen::Index>(g.vertex_count() * g.dim())));
    EXPECT_GE(r, -1e-12);
    EXPECT_LE(r, 2.0 + 1e-10);
  }
  EXPECT_THROW(rayleigh(cycle_graph(3, identity(1)), Vector::Zero(3)), precondition_error);
}

TEST(Factorization, SingleFactorIsExact) {
  random::Rng rng(8);
  const std::vector<ConnectionGraph> f{random::regular_graph(rng, 5, 2, false)};
  EXPECT_EQ(check_product_factorization(f), 0.0);
}

TEST(Factorization, TwoRotatedSquares) {
  const std::vector<ConnectionGraph> f{cycle_graph(4, rotation(0.3)), cycle_graph(4, rotation(1.9))};
  EXPECT_LE(check_product_factorization(f), 1e-12);
}

TEST(Factorization, MixedDegreesAndDimensions) {
  random::Rng rng(9);
  const std::vector<ConnectionGraph> f{random::regular_graph(rng, 3, 2, false),
                                       random::regular_graph(rng, 4, 1, true),
                                       random::regular_graph(rng, 3, 3, true)};
  EXPECT_LE(check_product_factorization(f), 1e-12);
}

TEST(Factorization, NonRegularFactorRejected) {
  ConnectionGraph path(1);
  for (const char* id : {"a", "b", "c"}) path.add_vertex(id);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  const std::vector<ConnectionGraph> f{cycle_graph(4, identity(1)), path};
  EXPECT_THROW(check_product_factorization(f), precondition_error);
  const std::vector<ConnectionGraph> weighted{single_edge(identity(1), 2.0)};
  EXPECT_THROW(check_product_factorization(weighted), precondition_error);
}

TEST(Factorization, ShuffleIsAPermutation) {
  const std::vector<ConnectionGraph> f{cycle_graph(3, rotation(0.1)), cycle_graph(4, identity(3))};
  auto perm = product_to_kron_order(f);
  std::sort(perm.begin(), perm.end());
  for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(perm[i], i);
  EXPECT_EQ(perm.size(), 3u * 4u * 2u * 3u);
}
