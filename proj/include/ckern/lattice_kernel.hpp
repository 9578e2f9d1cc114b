#ifndef CKERN_LATTICE_KERNEL_HPP
#define CKERN_LATTICE_KERNEL_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ckern/blockmat.hpp"
#include "ckern/graph.hpp"
#include "ckern/laplacian.hpp"
#include "ckern/series.hpp"

namespace ckern {

/// Connection on the unit-weight integer line, given by the forward steps
/// σ_{x,x+1}. Either constant on all of ℤ or tabulated on a finite window
/// [lo, hi] of vertices.
class LatticeConnection1D {
 public:
  static LatticeConnection1D constant(Matrix sigma) {
    LatticeConnection1D c;
    c.constant_ = true;
    c.steps_.push_back(std::move(sigma));
    c.lo_ = std::numeric_limits<std::int64_t>::min();
    c.hi_ = std::numeric_limits<std::int64_t>::max();
    return c;
  }

  /// steps[i] = σ_{lo+i, lo+i+1}; the window covers vertices lo … lo+steps.size().
  static LatticeConnection1D windowed(std::int64_t lo, std::vector<Matrix> steps) {
    if (steps.empty()) throw precondition_error("LatticeConnection1D: empty window");
    LatticeConnection1D c;
    c.constant_ = false;
    c.lo_ = lo;
    c.hi_ = lo + static_cast<std::int64_t>(steps.size());
    c.steps_ = std::move(steps);
    for (const auto& s : c.steps_) {
      if (s.rows() != c.steps_.front().rows() || s.cols() != s.rows()) {
        throw precondition_error("LatticeConnection1D: step matrices differ in shape");
      }
    }
    return c;
  }

  std::size_t dim() const { return static_cast<std::size_t>(steps_.front().rows()); }
  bool is_constant() const { return constant_; }
  std::int64_t window_lo() const { return lo_; }
  std::int64_t window_hi() const { return hi_; }

  bool covers(std::int64_t x) const { return constant_ || (x >= lo_ && x <= hi_); }

  /// σ_{x,x+1}.
  const Matrix& step(std::int64_t x) const {
    if (constant_) return steps_.front();
    if (x < lo_ || x >= hi_) {
      throw precondition_error("lattice connection window [" + std::to_string(lo_) + ", " + std::to_string(hi_) +
                               "] does not contain edge (" + std::to_string(x) + ", " + std::to_string(x + 1) + ")");
    }
    return steps_[static_cast<std::size_t>(x - lo_)];
  }

  /// Signature of the unique path x → x+a.
  Matrix signature(std::int64_t x, std::int64_t a) const {
    Matrix s = identity(dim());
    if (a >= 0) {
      for (std::int64_t i = 0; i < a; ++i) s = s * step(x + i);
    } else {
      for (std::int64_t i = 0; i < -a; ++i) s = s * step(x - i - 1).transpose();
    }
    return s;
  }

 private:
  LatticeConnection1D() = default;
  bool constant_ = true;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  std::vector<Matrix> steps_;
};

/// H_t^σ(x, x+a) on (ℤ, σ): series coefficient times the path signature.
inline Matrix z_kernel_block(const LatticeConnection1D& conn, std::int64_t x, std::int64_t a, double t,
                             const SeriesControl& ctl = {}) {
  return z_series_coeff(a, t, ctl) * conn.signature(x, a);
}

/// H_t(x, x+a) on (ℤⁿ, σ^{(1)}⊗…⊗σ^{(n)}): product of per-axis series at
/// time t/n times the Kronecker product of per-axis signatures.
inline Matrix zn_kernel_block(std::span<const LatticeConnection1D> conns, std::span<const std::int64_t> x,
                              std::span<const std::int64_t> a, double t, const SeriesControl& ctl = {}) {
  const std::size_t n = conns.size();
  if (n == 0 || x.size() != n || a.size() != n) {
    throw precondition_error("zn_kernel_block: need one connection, coordinate and offset per axis");
  }
  const double tau = t / static_cast<double>(n);
  double coeff = 1.0;
  std::vector<Matrix> sigs;
  for (std::size_t i = 0; i < n; ++i) {
    coeff *= z_series_coeff(a[i], tau, ctl);
    sigs.push_back(conns[i].signature(x[i], a[i]));
  }
  return coeff * kron_product(sigs);
}

// ---------------------------------------------------------------------------
// Finite-graph routes

/// e^{−t𝓛^σ} through the symmetric eigendecomposition (exactly I at t = 0).
inline BlockMatrix dense_kernel(const ConnectionGraph& g, double t) {
  if (!(t >= 0.0)) throw precondition_error("dense_kernel: t must be >= 0");
  if (t == 0.0) {
    const auto n = static_cast<Eigen::Index>(g.vertex_count() * g.dim());
    return BlockMatrix(Matrix::Identity(n, n), g.dim());
  }
  const Spectrum s = sym_eig(normalized_laplacian(g).matrix());
  return BlockMatrix(spectral_apply(s, [t](double mu) { return std::exp(-t * mu); }), g.dim());
}

/// Same weights and edges with σ ≡ 1 (d = 1).
inline ConnectionGraph underlying_graph(const ConnectionGraph& g) {
  ConnectionGraph out(1);
  for (const auto& id : g.vertex_ids()) out.add_vertex(id);
  for (const Edge& e : g.edges()) out.add_edge(e.u, e.v, e.weight);
  return out;
}

/// Heat kernel of the underlying scalar graph.
inline Matrix scalar_heat_kernel(const ConnectionGraph& g, double t) {
  return dense_kernel(underlying_graph(g), t).matrix();
}

struct KernelBlockResult {
  Matrix block;
  bool connected = true;
};

/// H_t^σ(x,y) = H_t(x,y)·σ_{P x→y} on a consistent graph. Precomputes the
/// scalar kernel once for repeated block queries.
class ConsistentKernel {
 public:
  ConsistentKernel(const ConnectionGraph& g, double t) : graph_(&g) {
    const auto report = is_consistent(g);
    if (!report.consistent) {
      std::string cycle;
      for (auto v : report.witness) cycle += (cycle.empty() ? "" : "->") + g.id(v);
      throw precondition_error("graph is not consistent; cycle " + cycle + " has signature != I");
    }
    forest_ = report.forest;
    scalar_ = scalar_heat_kernel(g, t);
  }

  KernelBlockResult block(std::size_t x, std::size_t y) const {
    if (forest_.component.at(x) != forest_.component.at(y)) {
      return {Matrix::Zero(static_cast<Eigen::Index>(graph_->dim()), static_cast<Eigen::Index>(graph_->dim())), false};
    }
    const auto path = tree_path(forest_, x, y);
    return {scalar_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) * path_signature(*graph_, path), true};
  }

 private:
  const ConnectionGraph* graph_;
  SpanningForest forest_;
  Matrix scalar_;
};

inline KernelBlockResult consistent_kernel_block(const ConnectionGraph& g, std::size_t x, std::size_t y, double t) {
  return ConsistentKernel(g, t).block(x, y);
}

/// Σ e^{−tμ} Φ Φᵀ over the eigensystem Φ_{i,j}(x) = f_i(x)·g_j(x) built from
/// the scalar eigenvectors f_i and the parallel frames g_j(x) = σ_{P x→root} e_j.
/// Requires a consistent graph.
inline BlockMatrix eigensystem_kernel(const ConnectionGraph& g, double t) {
  const auto report = is_consistent(g);
  if (!report.consistent) throw precondition_error("eigensystem_kernel: graph is not consistent");
  const std::size_t n = g.vertex_count();
  const auto d = static_cast<Eigen::Index>(g.dim());
  const Spectrum scalar = sym_eig(normalized_laplacian(underlying_graph(g)).matrix());

  BlockMatrix h(n, g.dim());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    const double decay = std::exp(-t * scalar.values(i));
    for (Eigen::Index j = 0; j < d; ++j) {
      Vector phi(static_cast<Eigen::Index>(n) * d);
      for (std::size_t x = 0; x < n; ++x) {
        // potential[x] is σ_{P root→x}; its transpose is σ_{P x→root}.
        phi.segment(static_cast<Eigen::Index>(x) * d, d) =
            scalar.vectors(static_cast<Eigen::Index>(x), i) * report.forest.potential[x].transpose().col(j);
      }
      h.matrix().noalias() += decay * phi * phi.transpose();
    }
  }
  return h;
}

}  // namespace ckern

#endif  // CKERN_LATTICE_KERNEL_HPP
