#ifndef CKERN_BLOCKMAT_HPP
#define CKERN_BLOCKMAT_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "ckern/error.hpp"

namespace ckern {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;

/// Largest absolute entry; the `‖·‖_∞` used for all entrywise residuals.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

inline Matrix identity(std::size_t d) {
  return Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

/// Counter-clockwise plane rotation [[cos θ, −sin θ], [sin θ, cos θ]].
inline Matrix rotation(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

/// ‖QᵀQ − I‖_∞, or +inf for a non-square input.
inline double orthogonality_defect(const Matrix& q) {
  if (q.rows() != q.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(q.transpose() * q - Matrix::Identity(q.rows(), q.cols()));
}

/// Square matrix partitioned into d×d blocks indexed by vertex pairs.
class BlockMatrix {
 public:
  BlockMatrix() = default;

  BlockMatrix(std::size_t n_blocks, std::size_t block_dim)
      : n_blocks_(n_blocks),
        block_dim_(block_dim),
        data_(Matrix::Zero(static_cast<Eigen::Index>(n_blocks * block_dim),
                           static_cast<Eigen::Index>(n_blocks * block_dim))) {}

  BlockMatrix(Matrix data, std::size_t block_dim) : block_dim_(block_dim), data_(std::move(data)) {
    if (block_dim_ == 0 || data_.rows() != data_.cols() ||
        static_cast<std::size_t>(data_.rows()) % block_dim_ != 0) {
      throw precondition_error("BlockMatrix: matrix is not square or not divisible into " +
                               std::to_string(block_dim_) + "x" + std::to_string(block_dim_) +
                               " blocks");
    }
    n_blocks_ = static_cast<std::size_t>(data_.rows()) / block_dim_;
  }

  std::size_t n_blocks() const { return n_blocks_; }
  std::size_t block_dim() const { return block_dim_; }
  Eigen::Index size() const { return data_.rows(); }

  auto block(std::size_t i, std::size_t j) {
    const auto d = static_cast<Eigen::Index>(block_dim_);
    return data_.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d, d, d);
  }
  auto block(std::size_t i, std::size_t j) const {
    const auto d = static_cast<Eigen::Index>(block_dim_);
    return data_.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d, d, d);
  }

  const Matrix& matrix() const { return data_; }
  Matrix& matrix() { return data_; }

 private:
  std::size_t n_blocks_ = 0;
  std::size_t block_dim_ = 1;
  Matrix data_;
};

/// Eigen-pairs of a symmetric matrix: ascending eigenvalues, orthonormal
/// eigenvector columns. Each column is sign-normalized so that its first
/// largest-magnitude entry is positive, which makes output reproducible.
struct Spectrum {
  Vector values;
  Matrix vectors;
};

template <typename DA, typename DB>
auto kron_product(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Scalar = std::common_type_t<typename DA::Scalar, typename DB::Scalar>;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          static_cast<Scalar>(a(i, j)) * b.template cast<Scalar>();
    }
  }
  return out;
}

/// Left-to-right Kronecker product of a non-empty list; the last factor's
/// index varies fastest.
inline Matrix kron_product(std::span<const Matrix> factors) {
  if (factors.empty()) throw precondition_error("kron_product: empty factor list");
  Matrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron_product(out, factors[i]);
  return out;
}

/// A ⊕ B = A ⊗ I_n + I_m ⊗ B.
template <typename DA, typename DB>
auto kron_sum(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw precondition_error("kron_sum: operands must be square");
  }
  using Scalar = std::common_type_t<typename DA::Scalar, typename DB::Scalar>;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Dense eye_m = Dense::Identity(a.rows(), a.rows());
  const Dense eye_n = Dense::Identity(b.rows(), b.rows());
  Dense out = kron_product(a, eye_n);
  out += kron_product(eye_m, b);
  return out;
}

inline Matrix kron_sum(std::span<const Matrix> terms) {
  if (terms.empty()) throw precondition_error("kron_sum: empty term list");
  Matrix out = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) out = kron_sum(out, terms[i]);
  return out;
}

namespace detail {

inline void normalize_signs(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      // 1e-12 slack keeps the pivot choice stable under roundoff ties.
      if (std::abs(vectors(r, c)) > best + 1e-12) {
        best = std::abs(vectors(r, c));
        arg = r;
      }
    }
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

}  // namespace detail

inline Spectrum sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw precondition_error("sym_eig: matrix is not square");
  const double scale = max_abs(a);
  if (max_abs(a - a.transpose()) > 1e-10 * scale) {
    throw precondition_error("sym_eig: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.transpose()));
  if (solver.info() != Eigen::Success) throw numeric_error("sym_eig: eigensolver did not converge");
  Spectrum s{solver.eigenvalues(), solver.eigenvectors()};
  detail::normalize_signs(s.vectors);
  return s;
}

/// V·f(Λ)·Vᵀ for a spectrum and a scalar function.
template <typename F>
Matrix spectral_apply(const Spectrum& s, F&& f) {
  Vector fv = s.values.unaryExpr(std::forward<F>(f));
  return s.vectors * fv.asDiagonal() * s.vectors.transpose();
}

namespace detail {

// Scaling and squaring: scale until ‖A/2^s‖₁ ≤ 0.5, Taylor degree 18.
template <typename Dense>
Dense taylor_exp(const Dense& a) {
  constexpr int kDegree = 18;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Dense scaled = a / std::ldexp(1.0, squarings);
  Dense result = Dense::Identity(a.rows(), a.cols());
  Dense term = result;
  for (int k = 1; k <= kDegree; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace detail

/// Matrix exponential. Real symmetric input goes through sym_eig; anything
/// else (orthogonal, skew, complex) through scaling and squaring.
template <typename Derived>
auto matrix_exp(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a.rows() != a.cols()) throw precondition_error("matrix_exp: matrix is not square");
  const Dense m = a;
  if constexpr (std::is_same_v<Scalar, double>) {
    if (m.size() > 0 && max_abs(m - m.transpose()) == 0.0) {
      return Dense(spectral_apply(sym_eig(m), [](double x) { return std::exp(x); }));
    }
  }
  return detail::taylor_exp(m);
}

}  // namespace ckern

#endif  // CKERN_BLOCKMAT_HPP
