#ifndef CKERN_LAPLACIAN_HPP
#define CKERN_LAPLACIAN_HPP

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "ckern/blockmat.hpp"
#include "ckern/graph.hpp"

namespace ckern {

/// Function V → ℝ^d stacked vertex-major into a length n·d vector.
using VertexFunction = Vector;

/// A^σ: block (u,v) = w_uv·σ_uv for u∼v, zero otherwise.
inline BlockMatrix adjacency(const ConnectionGraph& g) {
  BlockMatrix a(g.vertex_count(), g.dim());
  for (const Edge& e : g.edges()) {
    a.block(e.u, e.v) = e.weight * e.sigma_uv;
    a.block(e.v, e.u) = e.weight * e.sigma_uv.transpose();
  }
  return a;
}

/// D^σ: block (u,u) = d(u)·I.
inline BlockMatrix degree_matrix(const ConnectionGraph& g) {
  BlockMatrix d(g.vertex_count(), g.dim());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) d.block(v, v) = g.degree(v) * identity(g.dim());
  return d;
}

/// L^σ = D^σ − A^σ.
inline BlockMatrix laplacian(const ConnectionGraph& g) {
  BlockMatrix l = degree_matrix(g);
  l.matrix() -= adjacency(g).matrix();
  return l;
}

/// 𝓛^σ = I − (D^σ)^{-1/2} A^σ (D^σ)^{-1/2}. Rejects zero-degree vertices.
inline BlockMatrix normalized_laplacian(const ConnectionGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<double> inv_sqrt(n);
  for (std::size_t v = 0; v < n; ++v) {
    const double deg = g.degree(v);
    if (!(deg > 0.0)) {
      throw precondition_error("normalized_laplacian: vertex '" + g.id(v) + "' has zero degree");
    }
    inv_sqrt[v] = 1.0 / std::sqrt(deg);
  }
  BlockMatrix l(Matrix::Identity(static_cast<Eigen::Index>(n * g.dim()), static_cast<Eigen::Index>(n * g.dim())),
                g.dim());
  for (const Edge& e : g.edges()) {
    const double s = e.weight * inv_sqrt[e.u] * inv_sqrt[e.v];
    l.block(e.u, e.v) -= s * e.sigma_uv;
    l.block(e.v, e.u) -= s * e.sigma_uv.transpose();
  }
  return l;
}

/// L^σ f evaluated vertex by vertex: Σ_{v∼u} w_uv (f(u) − σ_uv f(v)).
inline VertexFunction apply_laplacian(const ConnectionGraph& g, const VertexFunction& f) {
  const auto d = static_cast<Eigen::Index>(g.dim());
  if (f.size() != static_cast<Eigen::Index>(g.vertex_count()) * d) {
    throw precondition_error("apply_laplacian: function length differs from n*d");
  }
  VertexFunction out = VertexFunction::Zero(f.size());
  for (std::size_t u = 0; u < g.vertex_count(); ++u) {
    const auto iu = static_cast<Eigen::Index>(u) * d;
    for (const auto& nb : g.neighbors(u)) {
      const auto iv = static_cast<Eigen::Index>(nb.vertex) * d;
      out.segment(iu, d) += g.edges()[nb.edge].weight * (f.segment(iu, d) - g.sigma(u, nb.vertex) * f.segment(iv, d));
    }
  }
  return out;
}

/// fᵀ𝓛^σ f / fᵀf.
inline double rayleigh(const ConnectionGraph& g, const VertexFunction& f) {
  const auto n = static_cast<Eigen::Index>(g.vertex_count() * g.dim());
  if (f.size() != n) throw precondition_error("rayleigh: function length differs from n*d");
  const double norm2 = f.squaredNorm();
  if (norm2 == 0.0) throw precondition_error("rayleigh: zero function");
  return f.dot(normalized_laplacian(g).matrix() * f) / norm2;
}

/// Common degree of a regular graph with unit weights; throws otherwise.
inline double unit_regular_degree(const ConnectionGraph& g) {
  if (g.vertex_count() == 0) throw precondition_error("graph has no vertices");
  for (const Edge& e : g.edges()) {
    if (e.weight != 1.0) throw precondition_error("factor does not have unit weights");
  }
  const double r = g.degree(0);
  for (std::size_t v = 1; v < g.vertex_count(); ++v) {
    if (g.degree(v) != r) throw precondition_error("factor is not regular");
  }
  if (r == 0.0) throw precondition_error("factor has isolated vertices");
  return r;
}

/// Maps the product graph's index (vertex tuple, then fibre tuple) to the
/// Kronecker-sum index ((x1,c1),(x2,c2),…).
inline std::vector<std::size_t> product_to_kron_order(std::span<const ConnectionGraph> factors) {
  const std::size_t m = factors.size();
  std::vector<std::size_t> n_ext, d_ext, interleaved;
  for (const auto& f : factors) {
    n_ext.push_back(f.vertex_count());
    d_ext.push_back(f.dim());
    interleaved.push_back(f.vertex_count());
    interleaved.push_back(f.dim());
  }
  const std::size_t big_n = std::accumulate(n_ext.begin(), n_ext.end(), std::size_t{1}, std::multiplies<>());
  const std::size_t big_d = std::accumulate(d_ext.begin(), d_ext.end(), std::size_t{1}, std::multiplies<>());
  std::vector<std::size_t> perm(big_n * big_d);
  std::vector<std::size_t> idx(2 * m);
  for (std::size_t p = 0; p < big_n; ++p) {
    const auto xs = unravel(p, n_ext);
    for (std::size_t c = 0; c < big_d; ++c) {
      const auto cs = unravel(c, d_ext);
      for (std::size_t i = 0; i < m; ++i) {
        idx[2 * i] = xs[i];
        idx[2 * i + 1] = cs[i];
      }
      perm[p * big_d + c] = ravel(idx, interleaved);
    }
  }
  return perm;
}

/// ‖𝓛^σ̂(Γ₁□…□Γ_m) − ⊕ᵢ (Rᵢ/ΣR)·𝓛^{σ(i)}‖_∞ for R_i-regular unit-weight
/// factors, comparing the two sides in the Kronecker index order.
inline double check_product_factorization(std::span<const ConnectionGraph> factors) {
  if (factors.empty()) throw precondition_error("check_product_factorization: empty factor list");
  std::vector<double> degrees;
  for (const auto& f : factors) degrees.push_back(unit_regular_degree(f));
  const double total = std::accumulate(degrees.begin(), degrees.end(), 0.0);

  std::vector<Matrix> terms;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    terms.push_back((degrees[i] / total) * normalized_laplacian(factors[i]).matrix());
  }
  const Matrix ksum = kron_sum(terms);
  const Matrix product = normalized_laplacian(cartesian_product(factors)).matrix();

  const auto perm = product_to_kron_order(factors);
  double residual = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = 0; j < perm.size(); ++j) {
      residual = std::max(residual, std::abs(product(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                             ksum(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j]))));
    }
  }
  return residual;
}

}  // namespace ckern

#endif  // CKERN_LAPLACIAN_HPP
