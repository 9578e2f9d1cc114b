#ifndef CKERN_GRAPH_HPP
#define CKERN_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ckern/blockmat.hpp"
#include "ckern/error.hpp"

namespace ckern {

/// Tolerances shared by the graph checks.
inline constexpr double kOrthoTol = 1e-12;
inline constexpr double kConsistencyTol = 1e-10;

/// One undirected edge, stored once. The connection on the reverse direction
/// is sigma_uvᵀ (= σ_uv⁻¹ for an orthogonal σ_uv).
struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 1.0;
  Matrix sigma_uv;
};

struct Neighbor {
  std::size_t vertex;
  std::size_t edge;
};

/// Weighted undirected graph with an orthogonal matrix on every directed edge.
///
/// Vertices are addressed by their insertion index; the opaque string ids are
/// only used for I/O. Structural errors (unknown index, self loop, duplicate
/// edge) throw; value-level invariants (orthogonality, positive weights,
/// matching dimensions) are left to validate() so that invalid inputs can be
/// reported rather than rejected.
class ConnectionGraph {
 public:
  explicit ConnectionGraph(std::size_t dim = 1) : dim_(dim) {
    if (dim == 0) throw precondition_error("ConnectionGraph: dimension must be positive");
  }

  std::size_t add_vertex(std::string id) {
    if (index_.contains(id)) throw precondition_error("duplicate vertex id '" + id + "'");
    index_.emplace(id, ids_.size());
    ids_.push_back(std::move(id));
    adjacency_.emplace_back();
    return ids_.size() - 1;
  }

  std::size_t add_edge(std::size_t u, std::size_t v, double weight, Matrix sigma_uv) {
    if (u >= ids_.size() || v >= ids_.size()) throw precondition_error("add_edge: vertex index out of range");
    if (u == v) throw precondition_error("add_edge: self loop at '" + ids_[u] + "'");
    if (edge_between(u, v)) {
      throw precondition_error("add_edge: duplicate edge '" + ids_[u] + "'-'" + ids_[v] + "'");
    }
    edges_.push_back(Edge{u, v, weight, std::move(sigma_uv)});
    adjacency_[u].push_back({v, edges_.size() - 1});
    adjacency_[v].push_back({u, edges_.size() - 1});
    return edges_.size() - 1;
  }

  std::size_t add_edge(std::size_t u, std::size_t v, double weight = 1.0) {
    return add_edge(u, v, weight, identity(dim_));
  }

  std::size_t dim() const { return dim_; }
  std::size_t vertex_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& vertex_ids() const { return ids_; }
  const std::string& id(std::size_t v) const { return ids_.at(v); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Neighbor>& neighbors(std::size_t v) const { return adjacency_.at(v); }

  std::optional<std::size_t> index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> edge_between(std::size_t u, std::size_t v) const {
    for (const auto& nb : adjacency_.at(u)) {
      if (nb.vertex == v) return nb.edge;
    }
    return std::nullopt;
  }

  /// w_{uv}, or 0 when u and v are not adjacent.
  double weight(std::size_t u, std::size_t v) const {
    auto e = edge_between(u, v);
    return e ? edges_[*e].weight : 0.0;
  }

  /// σ_{uv} for the directed edge u→v.
  Matrix sigma(std::size_t u, std::size_t v) const {
    auto e = edge_between(u, v);
    if (!e) throw path_error("'" + ids_.at(u) + "' and '" + ids_.at(v) + "' are not adjacent");
    const Edge& edge = edges_[*e];
    return edge.u == u ? edge.sigma_uv : Matrix(edge.sigma_uv.transpose());
  }

  double degree(std::size_t v) const {
    double d = 0.0;
    for (const auto& nb : adjacency_.at(v)) d += edges_[nb.edge].weight;
    return d;
  }

 private:
  std::size_t dim_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind { orthogonality, inverse_pairing, weight_positivity, dimension_mismatch };

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::orthogonality: return "orthogonality";
    case ViolationKind::inverse_pairing: return "inverse_pairing";
    case ViolationKind::weight_positivity: return "weight_positivity";
    case ViolationKind::dimension_mismatch: return "dimension_mismatch";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::size_t edge;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Edge-level override of the derived reverse connection. Only used by
/// validation inputs that carry an explicit σ_vu (see io.hpp).
struct ExplicitReverse {
  std::size_t edge;
  Matrix sigma_vu;
};

/// Lists every violated connection-graph invariant. Never throws.
inline ValidationReport validate(const ConnectionGraph& g, std::span<const ExplicitReverse> reverses = {}) {
  ValidationReport report;
  const auto d = static_cast<Eigen::Index>(g.dim());
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge& e = g.edges()[i];
    const std::string name = "edge '" + g.id(e.u) + "'-'" + g.id(e.v) + "'";
    if (!(e.weight > 0.0)) {
      report.violations.push_back({ViolationKind::weight_positivity, i, name + ": weight must be > 0"});
    }
    if (e.sigma_uv.rows() != d || e.sigma_uv.cols() != d) {
      report.violations.push_back({ViolationKind::dimension_mismatch, i,
                                   name + ": connection is " + std::to_string(e.sigma_uv.rows()) + "x" +
                                       std::to_string(e.sigma_uv.cols()) + ", expected " +
                                       std::to_string(d) + "x" + std::to_string(d)});
      continue;
    }
    if (orthogonality_defect(e.sigma_uv) > kOrthoTol) {
      report.violations.push_back({ViolationKind::orthogonality, i, name + ": sigma_uv is not orthogonal"});
    }
  }
  for (const auto& r : reverses) {
    if (r.edge >= g.edge_count()) continue;
    const Edge& e = g.edges()[r.edge];
    const std::string name = "edge '" + g.id(e.u) + "'-'" + g.id(e.v) + "'";
    if (r.sigma_vu.rows() != d || r.sigma_vu.cols() != d) {
      report.violations.push_back({ViolationKind::dimension_mismatch, r.edge, name + ": sigma_vu has wrong shape"});
      continue;
    }
    if (orthogonality_defect(r.sigma_vu) > kOrthoTol) {
      report.violations.push_back({ViolationKind::orthogonality, r.edge, name + ": sigma_vu is not orthogonal"});
    }
    if (e.sigma_uv.rows() == d && e.sigma_uv.cols() == d &&
        max_abs(e.sigma_uv * r.sigma_vu - identity(g.dim())) > kOrthoTol) {
      report.violations.push_back(
          {ViolationKind::inverse_pairing, r.edge, name + ": sigma_uv * sigma_vu != I"});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Paths and consistency

/// Ordered product σ_{x0x1}·σ_{x1x2}⋯; I for a single-vertex path.
inline Matrix path_signature(const ConnectionGraph& g, std::span<const std::size_t> path) {
  if (path.empty()) throw path_error("path_signature: empty path");
  Matrix s = identity(g.dim());
  for (std::size_t i = 0; i + 1 < path.size(); ++i) s = s * g.sigma(path[i], path[i + 1]);
  return s;
}

/// Breadth-first spanning forest. parent[root] == root.
struct SpanningForest {
  std::vector<std::size_t> parent;
  std::vector<std::size_t> component;
  std::vector<std::size_t> depth;
  /// Signature of the tree path from the component root to each vertex.
  std::vector<Matrix> potential;
};

inline SpanningForest spanning_forest(const ConnectionGraph& g) {
  const std::size_t n = g.vertex_count();
  SpanningForest f;
  f.parent.assign(n, n);
  f.component.assign(n, n);
  f.depth.assign(n, 0);
  f.potential.assign(n, Matrix());
  std::size_t comp = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (f.parent[root] != n) continue;
    f.parent[root] = root;
    f.component[root] = comp;
    f.potential[root] = identity(g.dim());
    std::queue<std::size_t> q;
    q.push(root);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (const auto& nb : g.neighbors(u)) {
        if (f.parent[nb.vertex] != n) continue;
        f.parent[nb.vertex] = u;
        f.component[nb.vertex] = comp;
        f.depth[nb.vertex] = f.depth[u] + 1;
        f.potential[nb.vertex] = f.potential[u] * g.sigma(u, nb.vertex);
        q.push(nb.vertex);
      }
    }
    ++comp;
  }
  return f;
}

/// Tree path from u to v inside one component (u first, v last).
inline std::vector<std::size_t> tree_path(const SpanningForest& f, std::size_t u, std::size_t v) {
  std::vector<std::size_t> up;
  std::vector<std::size_t> down;
  while (f.depth[u] > f.depth[v]) { up.push_back(u); u = f.parent[u]; }
  while (f.depth[v] > f.depth[u]) { down.push_back(v); v = f.parent[v]; }
  while (u != v) {
    up.push_back(u);
    down.push_back(v);
    u = f.parent[u];
    v = f.parent[v];
  }
  up.push_back(u);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

struct ConsistencyReport {
  bool consistent = true;
  /// Closed walk x0∼x1∼…∼x0 whose signature is not I (empty when consistent).
  std::vector<std::size_t> witness;
  /// ‖σ_witness − I‖_∞.
  double witness_defect = 0.0;
  SpanningForest forest;
};

/// Spanning-tree potentials plus a check of every non-tree edge.
inline ConsistencyReport is_consistent(const ConnectionGraph& g, double tol = kConsistencyTol) {
  ConsistencyReport r;
  r.forest = spanning_forest(g);
  const auto& f = r.forest;
  for (const Edge& e : g.edges()) {
    if (f.parent[e.u] == e.v || f.parent[e.v] == e.u) continue;
    // Cycle u → v → (tree) → u.
    const Matrix cycle = e.sigma_uv * f.potential[e.v].transpose() * f.potential[e.u];
    const double defect = max_abs(cycle - identity(g.dim()));
    if (defect > tol) {
      r.consistent = false;
      r.witness = {e.u};
      const auto back = tree_path(f, e.v, e.u);
      r.witness.insert(r.witness.end(), back.begin(), back.end());
      r.witness_defect = max_abs(path_signature(g, r.witness) - identity(g.dim()));
      return r;
    }
  }
  return r;
}

/// Some path from x to y (tree path), or nullopt when disconnected.
inline std::optional<std::vector<std::size_t>> find_path(const ConnectionGraph& g, std::size_t x, std::size_t y) {
  const auto f = spanning_forest(g);
  if (f.component.at(x) != f.component.at(y)) return std::nullopt;
  return tree_path(f, x, y);
}

// ---------------------------------------------------------------------------
// Products

/// Row-major multi-index helper for lexicographic tuple orderings.
inline std::vector<std::size_t> unravel(std::size_t flat, std::span<const std::size_t> extents) {
  std::vector<std::size_t> idx(extents.size());
  for (std::size_t i = extents.size(); i-- > 0;) {
    idx[i] = flat % extents[i];
    flat /= extents[i];
  }
  return idx;
}

inline std::size_t ravel(std::span<const std::size_t> idx, std::span<const std::size_t> extents) {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < extents.size(); ++i) flat = flat * extents[i] + idx[i];
  return flat;
}

/// Cartesian product with the product connection
/// I ⊗ … ⊗ σ^{(i)}_{x_i y_i} ⊗ … ⊗ I on edges moving coordinate i.
/// Vertices are ordered lexicographically, last factor fastest.
inline ConnectionGraph cartesian_product(std::span<const ConnectionGraph> factors) {
  if (factors.empty()) throw precondition_error("cartesian_product: empty factor list");
  if (factors.size() == 1) return factors.front();

  std::vector<std::size_t> extents;
  std::size_t dim = 1;
  std::size_t count = 1;
  for (const auto& f : factors) {
    extents.push_back(f.vertex_count());
    dim *= f.dim();
    count *= f.vertex_count();
  }

  ConnectionGraph out(dim);
  for (std::size_t p = 0; p < count; ++p) {
    const auto idx = unravel(p, extents);
    std::string id = "(";
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (i) id += ",";
      id += factors[i].id(idx[i]);
    }
    out.add_vertex(id + ")");
  }

  for (std::size_t p = 0; p < count; ++p) {
    const auto idx = unravel(p, extents);
    for (std::size_t i = 0; i < factors.size(); ++i) {
      for (const auto& nb : factors[i].neighbors(idx[i])) {
        if (nb.vertex < idx[i]) continue;  // each factor edge once, from its lower endpoint
        auto other = idx;
        other[i] = nb.vertex;
        std::vector<Matrix> parts;
        for (std::size_t j = 0; j < factors.size(); ++j) {
          parts.push_back(j == i ? factors[i].sigma(idx[i], nb.vertex) : identity(factors[j].dim()));
        }
        out.add_edge(p, ravel(other, extents), factors[i].edges()[nb.edge].weight, kron_product(parts));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Group actions and quotients

using Permutation = std::vector<std::size_t>;

/// A finite group of vertex permutations, stored by its enumerated elements
/// (identity first).
class GroupAction {
 public:
  static GroupAction trivial(std::size_t n) {
    Permutation id(n);
    std::iota(id.begin(), id.end(), std::size_t{0});
    return GroupAction(n, {id});
  }

  /// Closure of the generators under composition. Throws if a generator is not
  /// a permutation of {0..n-1} or the group exceeds max_order.
  static GroupAction generated_by(std::size_t n, std::vector<Permutation> generators,
                                  std::size_t max_order = 100000) {
    for (const auto& g : generators) {
      if (g.size() != n) throw precondition_error("group generator has wrong length");
      std::vector<bool> seen(n, false);
      for (auto x : g) {
        if (x >= n || seen[x]) throw precondition_error("group generator is not a permutation");
        seen[x] = true;
      }
    }
    GroupAction out = trivial(n);
    std::set<Permutation> known(out.elements_.begin(), out.elements_.end());
    for (std::size_t i = 0; i < out.elements_.size(); ++i) {
      for (const auto& gen : generators) {
        Permutation next(n);
        for (std::size_t x = 0; x < n; ++x) next[x] = gen[out.elements_[i][x]];
        if (known.insert(next).second) {
          out.elements_.push_back(next);
          if (out.elements_.size() > max_order) throw precondition_error("group order exceeds limit");
        }
      }
    }
    return out;
  }

  std::size_t vertex_count() const { return n_; }
  const std::vector<Permutation>& elements() const { return elements_; }

 private:
  GroupAction(std::size_t n, std::vector<Permutation> elements) : n_(n), elements_(std::move(elements)) {}
  std::size_t n_;
  std::vector<Permutation> elements_;
};

/// Why g fails to be an automorphism, or nullopt if it is one.
inline std::optional<std::string> automorphism_defect(const ConnectionGraph& g, const Permutation& p,
                                                      double tol = kOrthoTol) {
  if (p.size() != g.vertex_count()) return "permutation length differs from vertex count";
  for (const Edge& e : g.edges()) {
    const auto ge = g.edge_between(p[e.u], p[e.v]);
    const std::string name = "edge '" + g.id(e.u) + "'-'" + g.id(e.v) + "'";
    if (!ge) return name + " is not mapped to an edge";
    if (g.edges()[*ge].weight != e.weight) return name + " changes weight";
    if (max_abs(g.sigma(p[e.u], p[e.v]) - e.sigma_uv) > tol) return name + " changes connection";
  }
  // Edge counts match and edges map to edges, so non-edges map to non-edges.
  return std::nullopt;
}

struct QuotientGraph {
  ConnectionGraph graph;
  /// Orbit index of every upstream vertex.
  std::vector<std::size_t> class_of;
  /// Orbits, each sorted; orbit i's representative is orbits[i].front().
  std::vector<std::vector<std::size_t>> orbits;
};

/// Orbits under the action, ordered by minimal representative.
inline std::pair<std::vector<std::size_t>, std::vector<std::vector<std::size_t>>> orbits_of(
    const GroupAction& action) {
  const std::size_t n = action.vertex_count();
  std::vector<std::size_t> class_of(n, n);
  std::vector<std::vector<std::size_t>> orbits;
  for (std::size_t v = 0; v < n; ++v) {
    if (class_of[v] != n) continue;
    std::set<std::size_t> orbit;
    for (const auto& g : action.elements()) orbit.insert(g[v]);
    for (auto x : orbit) class_of[x] = orbits.size();
    orbits.emplace_back(orbit.begin(), orbit.end());
  }
  return {class_of, orbits};
}

/// Quotient connection graph Γ/G with accumulated weights and the inherited
/// connection. Pairs of classes that intersect produce no edge.
inline QuotientGraph quotient(const ConnectionGraph& g, const GroupAction& action) {
  if (action.vertex_count() != g.vertex_count()) {
    throw precondition_error("quotient: group acts on a different vertex count");
  }
  for (const auto& p : action.elements()) {
    if (auto why = automorphism_defect(g, p)) throw precondition_error("quotient: not an automorphism: " + *why);
  }
  auto [class_of, orbits] = orbits_of(action);

  // Reference connection per ordered class pair, then a full properness scan.
  std::map<std::pair<std::size_t, std::size_t>, Matrix> reference;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    for (const auto& nb : g.neighbors(v)) {
      const auto key = std::make_pair(class_of[v], class_of[nb.vertex]);
      if (key.first == key.second) continue;
      const Matrix s = g.sigma(v, nb.vertex);
      auto [it, inserted] = reference.emplace(key, s);
      if (!inserted && max_abs(it->second - s) > kOrthoTol) {
        throw properness_error("quotient: connection is not proper on '" + g.id(v) + "'->'" +
                               g.id(nb.vertex) + "'");
      }
    }
  }

  ConnectionGraph q(g.dim());
  for (const auto& orbit : orbits) q.add_vertex("[" + g.id(orbit.front()) + "]");

  // The weight sums over group elements, so a vertex fixed by a subgroup is
  // counted once per element; this keeps w̃ symmetric for any action.
  std::map<std::pair<std::size_t, std::size_t>, double> weight;
  for (std::size_t c = 0; c < orbits.size(); ++c) {
    const std::size_t x = orbits[c].front();
    for (std::size_t c2 = 0; c2 < orbits.size(); ++c2) {
      if (c2 == c) continue;
      const std::size_t y = orbits[c2].front();
      double w = 0.0;
      for (const auto& p : action.elements()) {
        if (auto e = g.edge_between(x, p[y])) w += g.edges()[*e].weight;
      }
      if (w > 0.0) weight[{c, c2}] = w;
    }
  }
  for (const auto& [key, w] : weight) {
    if (key.first > key.second) continue;
    const double back = weight.at({key.second, key.first});
    if (std::abs(back - w) > 1e-12 * std::max(1.0, w)) {
      throw precondition_error("quotient: accumulated weights are not symmetric between '" +
                               q.id(key.first) + "' and '" + q.id(key.second) + "'");
    }
    q.add_edge(key.first, key.second, w, reference.at(key));
  }
  return QuotientGraph{std::move(q), std::move(class_of), std::move(orbits)};
}

// ---------------------------------------------------------------------------
// Small builders

/// n-cycle 0∼1∼…∼n−1∼0 with σ_{i,i+1} = sigma (unit weights).
inline ConnectionGraph cycle_graph(std::size_t n, const Matrix& sigma) {
  if (n < 3) throw precondition_error("cycle_graph: need at least 3 vertices");
  ConnectionGraph g(static_cast<std::size_t>(sigma.rows()));
  for (std::size_t i = 0; i < n; ++i) g.add_vertex(std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n, 1.0, sigma);
  return g;
}

/// Rotation i ↦ i + shift (mod n) of the cycle's vertex indices.
inline Permutation cyclic_shift(std::size_t n, std::size_t shift) {
  Permutation p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = (i + shift) % n;
  return p;
}

}  // namespace ckern

#endif  // CKERN_GRAPH_HPP
