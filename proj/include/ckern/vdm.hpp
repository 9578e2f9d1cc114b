#ifndef CKERN_VDM_HPP
#define CKERN_VDM_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ckern/blockmat.hpp"
#include "ckern/graph.hpp"
#include "ckern/laplacian.hpp"
#include "ckern/lattice_kernel.hpp"

namespace ckern {

/// Vector diffusion map of a finite connection graph built from the K
/// lowest eigenpairs (λ, X) of 𝓛^σ. Row x holds the K² coordinates
/// e^{−t(λ_m+λ_n)/2}⟨X_n(x), X_m(x)⟩ with (m, n) flattened as m·K + n.
struct VdmEmbedding {
  double t = 0.0;
  std::size_t rank = 0;
  Matrix coords;

  double inner(std::size_t x, std::size_t y) const {
    return coords.row(static_cast<Eigen::Index>(x)).dot(coords.row(static_cast<Eigen::Index>(y)));
  }
  double distance(std::size_t x, std::size_t y) const {
    return (coords.row(static_cast<Eigen::Index>(x)) - coords.row(static_cast<Eigen::Index>(y))).norm();
  }
};

/// Squared Hilbert–Schmidt norm tr(H Hᵀ).
inline double hs_norm2(const Matrix& h) { return h.squaredNorm(); }

inline std::size_t vdm_full_rank(const ConnectionGraph& g) { return g.vertex_count() * g.dim(); }

inline VdmEmbedding vdm_embed(const ConnectionGraph& g, double t, std::size_t k) {
  const std::size_t full = vdm_full_rank(g);
  if (k < 1 || k > full) {
    throw precondition_error("vdm: K must lie in [1, " + std::to_string(full) + "], got " + std::to_string(k));
  }
  const Spectrum s = sym_eig(normalized_laplacian(g).matrix());
  const auto d = static_cast<Eigen::Index>(g.dim());
  const auto kk = static_cast<Eigen::Index>(k);

  VdmEmbedding out;
  out.t = t;
  out.rank = k;
  out.coords = Matrix::Zero(static_cast<Eigen::Index>(g.vertex_count()), kk * kk);
  Vector decay(kk);
  for (Eigen::Index i = 0; i < kk; ++i) decay(i) = std::exp(-0.5 * t * s.values(i));
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    // Columns of local are X_1(x)…X_K(x); its Gram matrix gives every ⟨X_n, X_m⟩.
    const Matrix local = s.vectors.block(static_cast<Eigen::Index>(x) * d, 0, d, kk);
    const Matrix gram = decay.asDiagonal() * (local.transpose() * local) * decay.asDiagonal();
    for (Eigen::Index m = 0; m < kk; ++m) {
      for (Eigen::Index n = 0; n < kk; ++n) out.coords(static_cast<Eigen::Index>(x), m * kk + n) = gram(m, n);
    }
  }
  return out;
}

/// √(‖H(x,x)‖² + ‖H(y,y)‖² − 2‖H(x,y)‖²)_HS from a precomputed kernel.
/// The cross term is split over both off-diagonal blocks so d(x,y) = d(y,x)
/// bit for bit.
inline double vdm_distance_hs(const BlockMatrix& h, std::size_t x, std::size_t y) {
  double r = (hs_norm2(h.block(x, x)) + hs_norm2(h.block(y, y))) -
             (hs_norm2(h.block(x, y)) + hs_norm2(h.block(y, x)));
  if (r < 0.0) {
    if (r > -1e-12) return 0.0;
    throw numeric_error("vdm: negative squared distance " + std::to_string(r));
  }
  return std::sqrt(r);
}

/// Vector diffusion distance. Full K uses heat-kernel HS norms; smaller K
/// uses the truncated embedding.
inline double vdm_distance(const ConnectionGraph& g, double t, std::size_t x, std::size_t y, std::size_t k) {
  if (x >= g.vertex_count() || y >= g.vertex_count()) throw precondition_error("vdm: vertex out of range");
  if (k == vdm_full_rank(g)) return vdm_distance_hs(dense_kernel(g, t), x, y);
  return vdm_embed(g, t, k).distance(x, y);
}

}  // namespace ckern

#endif  // CKERN_VDM_HPP
