#ifndef CKERN_TORUS_HPP
#define CKERN_TORUS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ckern/blockmat.hpp"
#include "ckern/graph.hpp"
#include "ckern/lattice_kernel.hpp"
#include "ckern/series.hpp"
#include "ckern/smith.hpp"

namespace ckern {

// ---------------------------------------------------------------------------
// Cosets and dual characters of ℤⁿ/Mℤⁿ

/// One representative per class of ℤⁿ/Mℤⁿ, sorted lexicographically.
class CosetSet {
 public:
  explicit CosetSet(const IntMatrix& m) : smith_(smith_form(m)) {
    const std::size_t n = static_cast<std::size_t>(m.rows());
    std::size_t count = 1;
    for (auto s : smith_.diag) count *= static_cast<std::size_t>(s);
    if (count < 2) throw precondition_error("cosets: |det M| must be > 1");

    std::vector<std::int64_t> extents(n, static_cast<std::int64_t>(count));
    double box = std::pow(static_cast<double>(count), static_cast<double>(n));
    std::vector<bool> seen(count, false);
    reps_.assign(count, IntVector());
    std::size_t found = 0;
    if (box <= 1e6) {
      // |det M|·ℤⁿ ⊂ Mℤⁿ, so every class meets [0, |det M|)ⁿ; take the
      // lexicographically first point of each.
      IntVector p(n, 0);
      while (found < count) {
        const std::size_t key = class_key(p);
        if (!seen[key]) {
          seen[key] = true;
          reps_[key] = p;
          ++found;
        }
        std::size_t i = n;
        while (i-- > 0) {
          if (++p[i] < static_cast<std::int64_t>(count)) break;
          p[i] = 0;
        }
      }
    } else {
      for (std::size_t key = 0; key < count; ++key) {
        std::vector<std::int64_t> k(n);
        std::size_t rest = key;
        for (std::size_t i = n; i-- > 0;) {
          k[i] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(smith_.diag[i]));
          rest /= static_cast<std::size_t>(smith_.diag[i]);
        }
        IntVector x(n, 0);
        for (std::size_t r = 0; r < n; ++r) {
          for (std::size_t c = 0; c < n; ++c) x[r] += smith_.left_inv(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * k[c];
        }
        reps_[key] = x;
      }
    }
    std::sort(reps_.begin(), reps_.end());
    position_.assign(count, 0);
    for (std::size_t i = 0; i < count; ++i) position_[class_key(reps_[i])] = i;
  }

  std::size_t size() const { return reps_.size(); }
  std::size_t dimension() const { return smith_.diag.size(); }
  const std::vector<IntVector>& representatives() const { return reps_; }
  const IntVector& representative(std::size_t i) const { return reps_.at(i); }
  const SmithForm& smith() const { return smith_; }

  /// Position of x's class in representatives().
  std::size_t index_of(std::span<const std::int64_t> x) const { return position_[class_key(x)]; }

  bool equivalent(std::span<const std::int64_t> x, std::span<const std::int64_t> y) const {
    return class_key(x) == class_key(y);
  }

 private:
  std::size_t class_key(std::span<const std::int64_t> x) const {
    const std::size_t n = smith_.diag.size();
    if (x.size() != n) throw precondition_error("coset lookup: point has wrong dimension");
    std::size_t key = 0;
    for (std::size_t r = 0; r < n; ++r) {
      std::int64_t k = 0;
      for (std::size_t c = 0; c < n; ++c) k += smith_.left(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * x[c];
      const std::int64_t s = smith_.diag[r];
      k %= s;
      if (k < 0) k += s;
      key = key * static_cast<std::size_t>(s) + static_cast<std::size_t>(k);
    }
    return key;
  }

  SmithForm smith_;
  std::vector<IntVector> reps_;
  std::vector<std::size_t> position_;
};

inline CosetSet enumerate_cosets(const IntMatrix& m) { return CosetSet(m); }

/// Frequencies w ∈ (Mᵀ)⁻¹ℤⁿ/ℤⁿ reduced to [0,1)ⁿ, stored as exact fractions
/// numerator/denominator.
struct CharacterSet {
  std::int64_t denominator = 1;
  std::vector<IntVector> numerators;

  std::size_t size() const { return numerators.size(); }

  std::vector<double> frequency(std::size_t i) const {
    std::vector<double> w;
    for (auto num : numerators.at(i)) w.push_back(static_cast<double>(num) / static_cast<double>(denominator));
    return w;
  }

  /// e^{2πi⟨w_i, z⟩}, with the phase reduced exactly before the trig call.
  std::complex<double> character(std::size_t i, std::span<const std::int64_t> z) const {
    const auto& num = numerators.at(i);
    __int128 phase = 0;
    for (std::size_t j = 0; j < num.size(); ++j) phase += static_cast<__int128>(num[j]) * z[j];
    phase %= denominator;
    if (phase < 0) phase += denominator;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(denominator);
    return {std::cos(angle), std::sin(angle)};
  }
};

inline CharacterSet enumerate_characters(const IntMatrix& m) {
  const SmithForm smith = smith_form(m);
  const std::size_t n = smith.diag.size();
  std::int64_t lcm = 1;
  std::size_t count = 1;
  for (auto s : smith.diag) {
    lcm = std::lcm(lcm, s);
    count *= static_cast<std::size_t>(s);
  }
  if (count < 2) throw precondition_error("characters: |det M| must be > 1");
  CharacterSet out;
  out.denominator = lcm;
  // With L·M·R = S: w = Lᵀ S⁻¹ k satisfies wᵀ M z = kᵀ R⁻¹ z ∈ ℤ.
  for (std::size_t key = 0; key < count; ++key) {
    std::vector<std::int64_t> k(n);
    std::size_t rest = key;
    for (std::size_t i = n; i-- > 0;) {
      k[i] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(smith.diag[i]));
      rest /= static_cast<std::size_t>(smith.diag[i]);
    }
    IntVector num(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      __int128 acc = 0;
      for (std::size_t j = 0; j < n; ++j) {
        acc += static_cast<__int128>(smith.left(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) * k[j] *
               (lcm / smith.diag[j]);
      }
      acc %= lcm;
      if (acc < 0) acc += lcm;
      num[i] = static_cast<std::int64_t>(acc);
    }
    out.numerators.push_back(std::move(num));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Torus specification

/// Integer matrix M with |det M| > 1 and one constant orthogonal connection
/// per axis, oriented σ_{x, x+e_i} = σ_i.
class TorusSpec {
 public:
  TorusSpec(IntMatrix m, std::vector<Matrix> sigmas) : m_(std::move(m)), sigmas_(std::move(sigmas)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) throw precondition_error("torus: M must be square and non-empty");
    if (sigmas_.size() != static_cast<std::size_t>(m_.rows())) {
      throw precondition_error("torus: need one connection per axis (" + std::to_string(m_.rows()) + ")");
    }
    det_ = int_determinant(m_);
    if (std::llabs(det_) <= 1) throw precondition_error("torus: |det M| must be > 1, got " + std::to_string(det_));
    for (std::size_t i = 0; i < sigmas_.size(); ++i) {
      if (orthogonality_defect(sigmas_[i]) > kOrthoTol) {
        throw precondition_error("torus: sigma_" + std::to_string(i + 1) + " is not orthogonal");
      }
    }
  }

  std::size_t n() const { return sigmas_.size(); }
  const IntMatrix& m() const { return m_; }
  const std::vector<Matrix>& sigmas() const { return sigmas_; }
  std::int64_t det() const { return det_; }
  std::size_t volume() const { return static_cast<std::size_t>(std::llabs(det_)); }

  /// Fibre dimension ∏ d_i.
  std::size_t fibre_dim() const {
    std::size_t d = 1;
    for (const auto& s : sigmas_) d *= static_cast<std::size_t>(s.rows());
    return d;
  }

 private:
  IntMatrix m_;
  std::vector<Matrix> sigmas_;
  std::int64_t det_ = 0;
};

/// σ^b for b ∈ ℤ (σ^{-1} = σᵀ).
inline Matrix orthogonal_power(const Matrix& sigma, std::int64_t b) {
  Matrix out = identity(static_cast<std::size_t>(sigma.rows()));
  const Matrix step = b >= 0 ? sigma : Matrix(sigma.transpose());
  for (std::int64_t i = 0; i < (b >= 0 ? b : -b); ++i) out = out * step;
  return out;
}

struct TorusGraph {
  ConnectionGraph graph;
  CosetSet cosets;
};

/// Quotient graph ℤⁿ/Mℤⁿ with the constant product connection. Vertex i is
/// cosets.representative(i). Neighbour classes reached several ways get the
/// summed weight; classes equal to their own neighbour get no edge.
inline TorusGraph build_torus_graph(const TorusSpec& spec) {
  CosetSet cosets(spec.m());
  const std::size_t n = spec.n();
  ConnectionGraph g(spec.fibre_dim());
  for (const auto& rep : cosets.representatives()) {
    std::string id = "[";
    for (std::size_t i = 0; i < rep.size(); ++i) id += (i ? "," : "") + std::to_string(rep[i]);
    g.add_vertex(id + "]");
  }

  std::vector<Matrix> axis_sigma(n), axis_sigma_inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Matrix> fwd, back;
    for (std::size_t j = 0; j < n; ++j) {
      fwd.push_back(i == j ? spec.sigmas()[j] : identity(static_cast<std::size_t>(spec.sigmas()[j].rows())));
      back.push_back(i == j ? Matrix(spec.sigmas()[j].transpose())
                            : identity(static_cast<std::size_t>(spec.sigmas()[j].rows())));
    }
    axis_sigma[i] = kron_product(fwd);
    axis_sigma_inv[i] = kron_product(back);
  }

  struct Accum {
    double weight = 0.0;
    Matrix sigma;
  };
  std::map<std::pair<std::size_t, std::size_t>, Accum> acc;
  for (std::size_t c = 0; c < cosets.size(); ++c) {
    const auto& x = cosets.representative(c);
    for (std::size_t i = 0; i < n; ++i) {
      for (int dir : {+1, -1}) {
        IntVector y = x;
        y[i] += dir;
        const std::size_t c2 = cosets.index_of(y);
        if (c2 == c) continue;
        const Matrix& s = dir > 0 ? axis_sigma[i] : axis_sigma_inv[i];
        auto& slot = acc[{c, c2}];
        if (slot.weight == 0.0) {
          slot.sigma = s;
        } else if (max_abs(slot.sigma - s) > kOrthoTol) {
          throw properness_error("torus: classes " + g.id(c) + " and " + g.id(c2) +
                                 " are joined by lattice edges carrying different connections");
        }
        slot.weight += 1.0;
      }
    }
  }
  for (const auto& [key, a] : acc) {
    if (key.first > key.second) continue;
    const auto& back = acc.at({key.second, key.first});
    if (back.weight != a.weight || max_abs(back.sigma - a.sigma.transpose()) > kOrthoTol) {
      throw properness_error("torus: connection between " + g.id(key.first) + " and " + g.id(key.second) +
                             " is not proper under M Z^n");
    }
    g.add_edge(key.first, key.second, a.weight, a.sigma);
  }
  return TorusGraph{std::move(g), std::move(cosets)};
}

// ---------------------------------------------------------------------------
// Lattice-translate sums

struct LatticeSumControl {
  /// Bound on the discarded Bessel tail mass (entrywise).
  double tail_tol = 1e-12;
  /// Cap on the number of lattice offsets visited.
  std::size_t max_points = 4'000'000;
  SeriesControl series{};
};

/// Smallest R with Σ_{|b|>R} e^{−τ}I_{|b|}(τ) < tol, using
/// I_{k+1}(τ)/I_k(τ) ≤ τ/(2(k+1)).
inline std::int64_t bessel_tail_radius(double tau, double tol) {
  // The bound decreases in r, so gallop then bisect.
  const auto ok = [&](std::int64_t r) {
    const double q = tau / (2.0 * static_cast<double>(r + 2));
    return q < 1.0 && 2.0 * bessel_i_scaled(r + 1, tau) / (1.0 - q) < tol;
  };
  std::int64_t lo = static_cast<std::int64_t>(std::ceil(tau)), step = 1;
  if (ok(lo)) return lo;
  std::int64_t hi = lo + step;
  while (!ok(hi)) {
    lo = hi;
    step *= 2;
    hi = lo + step;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

namespace detail {

template <typename CoeffFn>
Matrix lattice_sum(const TorusSpec& spec, const CosetSet& cosets, std::span<const std::int64_t> x,
                   std::span<const std::int64_t> y, double t, const LatticeSumControl& ctl, CoeffFn&& coeff) {
  const std::size_t n = spec.n();
  if (x.size() != n || y.size() != n) throw precondition_error("lattice sum: points must have n coordinates");
  if (!(t >= 0.0)) throw precondition_error("lattice sum: t must be >= 0");
  const double tau = t / static_cast<double>(n);
  const std::int64_t radius = bessel_tail_radius(tau, ctl.tail_tol / static_cast<double>(n));

  const double points = std::pow(static_cast<double>(2 * radius + 1), static_cast<double>(n));
  if (points > static_cast<double>(ctl.max_points)) {
    const auto fits = [&](double s) {
      const double side = 2.0 * static_cast<double>(bessel_tail_radius(s / n, ctl.tail_tol / n)) + 1.0;
      return std::pow(side, static_cast<double>(n)) <= static_cast<double>(ctl.max_points);
    };
    double lo = 0.0, hi = t;
    for (int it = 0; it < 40 && hi - lo > 1e-3 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (fits(mid) ? lo : hi) = mid;
    }
    const double cap = lo;
    throw numeric_error("lattice sum: radius " + std::to_string(radius) + " needs " + std::to_string(points) +
                        " offsets (limit " + std::to_string(ctl.max_points) + "); use t <= " + std::to_string(cap));
  }

  // Per-axis tables over b ∈ [−R, R].
  const auto width = static_cast<std::size_t>(2 * radius + 1);
  std::vector<std::vector<double>> coeffs(n, std::vector<double>(width));
  std::vector<std::vector<Matrix>> powers(n, std::vector<Matrix>(width));
  std::vector<double> by_order(static_cast<std::size_t>(radius) + 1);
  for (std::int64_t b = 0; b <= radius; ++b) by_order[static_cast<std::size_t>(b)] = coeff(b, tau);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::int64_t b = -radius; b <= radius; ++b) {
      const auto slot = static_cast<std::size_t>(b + radius);
      coeffs[i][slot] = by_order[static_cast<std::size_t>(b < 0 ? -b : b)];
      powers[i][slot] = orthogonal_power(spec.sigmas()[i], b);
    }
  }

  IntVector target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = y[i] - x[i];
  const auto d = static_cast<Eigen::Index>(spec.fibre_dim());
  Matrix sum = Matrix::Zero(d, d);
  IntVector b(n, -radius);
  std::vector<Matrix> parts(n);
  for (;;) {
    if (cosets.equivalent(b, target)) {
      double c = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto slot = static_cast<std::size_t>(b[i] + radius);
        c *= coeffs[i][slot];
        parts[i] = powers[i][slot];
      }
      sum += c * kron_product(parts);
    }
    std::size_t i = n;
    while (i-- > 0) {
      if (++b[i] <= radius) break;
      b[i] = -radius;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return sum;
}

}  // namespace detail

/// H_t([x],[y]) on the connection torus as the sum over a ∈ Mℤⁿ of ℤⁿ kernel
/// blocks at offset y + a − x (series coefficients at time t/n).
inline Matrix kernel_lattice_sum(const TorusSpec& spec, std::span<const std::int64_t> x,
                                 std::span<const std::int64_t> y, double t, const LatticeSumControl& ctl = {}) {
  const CosetSet cosets(spec.m());
  return detail::lattice_sum(spec, cosets, x, y, t, ctl,
                             [&ctl](std::int64_t b, double tau) { return z_series_coeff(b, tau, ctl.series); });
}

/// Same sum with Bessel weights ∏ e^{−t/n} I_{b_i}(t/n).
inline Matrix kernel_bessel_sum(const TorusSpec& spec, std::span<const std::int64_t> x,
                                std::span<const std::int64_t> y, double t, const LatticeSumControl& ctl = {}) {
  const CosetSet cosets(spec.m());
  return detail::lattice_sum(spec, cosets, x, y, t, ctl,
                             [](std::int64_t b, double tau) { return bessel_i_scaled(b, tau); });
}

// ---------------------------------------------------------------------------
// Character (spectral) sums

namespace detail {

template <typename AxisFn>
Matrix character_sum(const TorusSpec& spec, std::span<const std::int64_t> x, std::span<const std::int64_t> y,
                     double t, AxisFn&& axis_exp) {
  const std::size_t n = spec.n();
  if (x.size() != n || y.size() != n) throw precondition_error("spectral kernel: points must have n coordinates");
  if (!(t >= 0.0)) throw precondition_error("spectral kernel: t must be >= 0");
  const CharacterSet chars = enumerate_characters(spec.m());
  IntVector diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = x[i] - y[i];
  const double tau = t / static_cast<double>(n);
  const auto d = static_cast<Eigen::Index>(spec.fibre_dim());
  CMatrix sum = CMatrix::Zero(d, d);
  std::vector<CMatrix> parts(n);
  for (std::size_t k = 0; k < chars.size(); ++k) {
    const auto w = chars.frequency(k);
    for (std::size_t i = 0; i < n; ++i) parts[i] = axis_exp(spec.sigmas()[i], w[i], tau);
    CMatrix term = parts[0];
    for (std::size_t i = 1; i < n; ++i) term = kron_product(term, parts[i]);
    sum += chars.character(k, diff) * term;
  }
  sum *= std::exp(-t) / static_cast<double>(chars.size());
  const double re = max_abs(sum.real());
  const double im = max_abs(sum.imag());
  if (im >= 1e-10 * (1.0 + re)) {
    throw numeric_error("spectral kernel: imaginary residue " + std::to_string(im) + " did not cancel");
  }
  return sum.real();
}

}  // namespace detail

/// Character-sum form of the torus kernel:
///   (1/|det M|) Σ_w e^{−t} e^{2πi⟨w,x−y⟩} ⊗_j exp((t/n)·(e^{2πi w_j}σ_j + e^{−2πi w_j}σ_jᵀ)/2).
/// Each axis factor is the exponential of the Hermitian matrix whose
/// eigenvalues are Re(λ e^{2πi w_j}) over the eigenvalues λ of σ_j.
inline Matrix kernel_spectral(const TorusSpec& spec, std::span<const std::int64_t> x, std::span<const std::int64_t> y,
                              double t) {
  return detail::character_sum(spec, x, y, t, [](const Matrix& sigma, double w, double tau) {
    const std::complex<double> z = std::polar(1.0, 2.0 * std::numbers::pi * w);
    const CMatrix h = 0.5 * (z * sigma.cast<std::complex<double>>() +
                             std::conj(z) * sigma.transpose().cast<std::complex<double>>());
    return CMatrix(matrix_exp(tau * h));
  });
}

/// Variant with axis factor exp((t/n)·cos(2πw_j)·σ_j). Agrees with
/// kernel_spectral exactly when every σ_j is symmetric.
inline Matrix kernel_spectral_cosine(const TorusSpec& spec, std::span<const std::int64_t> x,
                                     std::span<const std::int64_t> y, double t) {
  return detail::character_sum(spec, x, y, t, [](const Matrix& sigma, double w, double tau) {
    const Matrix m = tau * std::cos(2.0 * std::numbers::pi * w) * sigma;
    return CMatrix(matrix_exp(m).cast<std::complex<double>>());
  });
}

/// ‖lattice sum − character sum‖_F at (x, y).
inline double trace_formula_residual(const TorusSpec& spec, std::span<const std::int64_t> x,
                                     std::span<const std::int64_t> y, double t, const LatticeSumControl& ctl = {}) {
  return (kernel_lattice_sum(spec, x, y, t, ctl) - kernel_spectral(spec, x, y, t)).norm();
}

/// ‖Σ_a ∏ e^{−t/n}I_{a_i}(t/n)·σ^{a} − character sum‖_F at x = y = 0.
inline double theta_relation_residual(const TorusSpec& spec, double t, const LatticeSumControl& ctl = {}) {
  const IntVector origin(spec.n(), 0);
  return (kernel_bessel_sum(spec, origin, origin, t, ctl) - kernel_spectral(spec, origin, origin, t)).norm();
}

/// (1/|det M|) Σ_w e^{2πi⟨w,z⟩}; 1 for z ∈ Mℤⁿ and 0 otherwise.
inline std::complex<double> character_mean(const CharacterSet& chars, std::span<const std::int64_t> z) {
  std::complex<double> s = 0.0;
  for (std::size_t k = 0; k < chars.size(); ++k) s += chars.character(k, z);
  return s / static_cast<double>(chars.size());
}

/// Eigenvalues of 𝓛 on the torus predicted from characters and the axis
/// eigenvalues: (1/n) Σ_j (1 − Re(λ_{k_j} e^{2πi w_j})), sorted ascending.
inline std::vector<double> torus_predicted_spectrum(const TorusSpec& spec) {
  const std::size_t n = spec.n();
  std::vector<Eigen::VectorXcd> axis_eigs;
  for (const auto& s : spec.sigmas()) axis_eigs.push_back(Eigen::EigenSolver<Matrix>(s).eigenvalues());
  const CharacterSet chars = enumerate_characters(spec.m());
  std::vector<std::size_t> extents;
  std::size_t combos = 1;
  for (const auto& e : axis_eigs) {
    extents.push_back(static_cast<std::size_t>(e.size()));
    combos *= static_cast<std::size_t>(e.size());
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < chars.size(); ++k) {
    const auto w = chars.frequency(k);
    for (std::size_t c = 0; c < combos; ++c) {
      const auto idx = unravel(c, extents);
      double mu = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const auto lambda = axis_eigs[j](static_cast<Eigen::Index>(idx[j]));
        mu += 1.0 - (lambda * std::polar(1.0, 2.0 * std::numbers::pi * w[j])).real();
      }
      out.push_back(mu / static_cast<double>(n));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Finite quotients

/// max over class pairs of ‖H^{Γ/G}([x],[y]) − Σ_{z∈[y]} H^Γ(x, z)‖_∞.
inline double quotient_kernel_sum_check(const ConnectionGraph& g, const GroupAction& action, double t) {
  const QuotientGraph q = quotient(g, action);
  const BlockMatrix hq = dense_kernel(q.graph, t);
  const BlockMatrix h = dense_kernel(g, t);
  double residual = 0.0;
  for (std::size_t p = 0; p < q.orbits.size(); ++p) {
    const std::size_t x = q.orbits[p].front();
    for (std::size_t r = 0; r < q.orbits.size(); ++r) {
      Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(g.dim()), static_cast<Eigen::Index>(g.dim()));
      const std::size_t y = q.orbits[r].front();
      for (const auto& perm : action.elements()) sum += h.block(x, perm[y]);
      residual = std::max(residual, max_abs(Matrix(hq.block(p, r)) - sum));
    }
  }
  return residual;
}

}  // namespace ckern

#endif  // CKERN_TORUS_HPP
