#ifndef CKERN_RANDOM_HPP
#define CKERN_RANDOM_HPP

#include <Eigen/QR>

#include <random>
#include <string>
#include <vector>

#include "ckern/blockmat.hpp"
#include "ckern/graph.hpp"

// Random inputs for property checks. Everything is driven by a caller-owned
// std::mt19937_64 so runs are reproducible from a seed.
namespace ckern::random {

using Rng = std::mt19937_64;

/// Haar-distributed orthogonal d×d matrix (QR of a Gaussian matrix with the
/// sign of R's diagonal folded into Q).
inline Matrix orthogonal(Rng& rng, std::size_t d) {
  std::normal_distribution<double> normal;
  const auto n = static_cast<Eigen::Index>(d);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Connected graph: random spanning tree plus each remaining pair with
/// probability p, weights in (0, 2], independent orthogonal connections.
inline ConnectionGraph connected_graph(Rng& rng, std::size_t n, std::size_t d, double p = 0.4) {
  ConnectionGraph g(d);
  for (std::size_t v = 0; v < n; ++v) g.add_vertex(std::to_string(v));
  auto weight = [&] { return 2.0 - uniform(rng, 0.0, 2.0); };
  for (std::size_t v = 1; v < n; ++v) g.add_edge(index(rng, 0, v - 1), v, weight(), orthogonal(rng, d));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (!g.edge_between(u, v) && uniform(rng, 0.0, 1.0) < p) g.add_edge(u, v, weight(), orthogonal(rng, d));
    }
  }
  return g;
}

/// Consistent graph: random frames O_v and σ_uv = O_uᵀ O_v, so every cycle
/// signature telescopes to I.
inline ConnectionGraph balanced_graph(Rng& rng, std::size_t n, std::size_t d, double p = 0.4) {
  ConnectionGraph g = connected_graph(rng, n, d, p);
  std::vector<Matrix> frames;
  for (std::size_t v = 0; v < n; ++v) frames.push_back(orthogonal(rng, d));
  ConnectionGraph out(d);
  for (const auto& id : g.vertex_ids()) out.add_vertex(id);
  for (const Edge& e : g.edges()) out.add_edge(e.u, e.v, e.weight, frames[e.u].transpose() * frames[e.v]);
  return out;
}

/// Unit-weight cycle (r = 2) or complete graph (r = n−1) with independent
/// random connections on each edge; both are regular.
inline ConnectionGraph regular_graph(Rng& rng, std::size_t n, std::size_t d, bool complete) {
  ConnectionGraph g(d);
  for (std::size_t v = 0; v < n; ++v) g.add_vertex(std::to_string(v));
  if (complete) {
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) g.add_edge(u, v, 1.0, orthogonal(rng, d));
    }
  } else {
    for (std::size_t v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n, 1.0, orthogonal(rng, d));
  }
  return g;
}

}  // namespace ckern::random

#endif  // CKERN_RANDOM_HPP
