#ifndef CKERN_SMITH_HPP
#define CKERN_SMITH_HPP

#include <Eigen/Core>

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <utility>
#include <vector>

#include "ckern/error.hpp"

namespace ckern {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = std::vector<std::int64_t>;

/// Exact determinant (fraction-free Bareiss elimination).
inline std::int64_t int_determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw precondition_error("determinant of a non-square matrix");
  const Eigen::Index n = m.rows();
  if (n == 0) return 1;
  Eigen::Matrix<__int128, Eigen::Dynamic, Eigen::Dynamic> a = m.cast<__int128>();
  __int128 prev = 1;
  int sign = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      Eigen::Index swap = k + 1;
      while (swap < n && a(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      a.row(k).swap(a.row(swap));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    }
    prev = a(k, k);
  }
  return static_cast<std::int64_t>(sign * a(n - 1, n - 1));
}

/// Diagonalization L·M·R = diag(s) with L, R unimodular and s_i > 0.
/// Only L and L⁻¹ are kept: ℤⁿ/Mℤⁿ ≅ ⊕ ℤ/s_iℤ through x ↦ (L x) mod s.
struct SmithForm {
  IntVector diag;
  IntMatrix left;
  IntMatrix left_inv;
};

inline SmithForm smith_form(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw precondition_error("smith_form: matrix is not square");
  const Eigen::Index n = m.rows();
  IntMatrix a = m;
  IntMatrix left = IntMatrix::Identity(n, n);
  IntMatrix left_inv = IntMatrix::Identity(n, n);

  // Row op helpers keep left·m·(col ops) = a and left_inv = left⁻¹.
  auto swap_rows = [&](Eigen::Index i, Eigen::Index j) {
    a.row(i).swap(a.row(j));
    left.row(i).swap(left.row(j));
    left_inv.col(i).swap(left_inv.col(j));
  };
  auto add_row = [&](Eigen::Index dst, Eigen::Index src, std::int64_t q) {  // row_dst -= q·row_src
    a.row(dst) -= q * a.row(src);
    left.row(dst) -= q * left.row(src);
    left_inv.col(src) += q * left_inv.col(dst);
  };

  for (Eigen::Index t = 0; t < n; ++t) {
    for (;;) {
      // Smallest nonzero pivot in the trailing block.
      Eigen::Index pr = -1, pc = -1;
      for (Eigen::Index i = t; i < n; ++i) {
        for (Eigen::Index j = t; j < n; ++j) {
          if (a(i, j) != 0 && (pr < 0 || std::llabs(a(i, j)) < std::llabs(a(pr, pc)))) {
            pr = i;
            pc = j;
          }
        }
      }
      if (pr < 0) throw precondition_error("smith_form: matrix is singular");
      if (pr != t) swap_rows(pr, t);
      if (pc != t) a.col(pc).swap(a.col(t));

      bool clean = true;
      for (Eigen::Index i = t + 1; i < n; ++i) {
        const std::int64_t q = a(i, t) / a(t, t);
        if (q != 0) add_row(i, t, q);
        if (a(i, t) != 0) clean = false;
      }
      for (Eigen::Index j = t + 1; j < n; ++j) {
        const std::int64_t q = a(t, j) / a(t, t);
        if (q != 0) a.col(j) -= q * a.col(t);
        if (a(t, j) != 0) clean = false;
      }
      if (clean) break;
    }
    if (a(t, t) < 0) {
      a.row(t) *= -1;
      left.row(t) *= -1;
      left_inv.col(t) *= -1;
    }
  }
  SmithForm out;
  for (Eigen::Index i = 0; i < n; ++i) out.diag.push_back(a(i, i));
  out.left = std::move(left);
  out.left_inv = std::move(left_inv);
  return out;
}

}  // namespace ckern

#endif  // CKERN_SMITH_HPP
