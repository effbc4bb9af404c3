#pragma once

#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/OrderingMethods>

#include "stcg/types.hpp"

namespace stcg {

namespace detail {

/**
 * @brief Pattern data shared by every shifted matrix M + lambda A.
 *
 * Holds the AMD ordering, the upper triangle of the permuted pattern in
 * compressed-column form with the matching M and A values, and the
 * elimination tree with column counts of L.
 */
struct SpatialSymbolic {
  Index n = 0;
  std::vector<int> new_index; ///< old -> permuted
  std::vector<int> col_ptr;   ///< permuted upper triangle, CSC
  std::vector<int> row_idx;
  std::vector<Real> mass_val;
  std::vector<Real> stiff_val;
  std::vector<int> parent; ///< elimination tree
  std::vector<int> l_ptr;  ///< column pointers of L
  Real mass_norm1 = 0.0;
  Real stiff_norm1 = 0.0;

  SpatialSymbolic(const SparseRealMatrix& mass, const SparseRealMatrix& stiffness)
      : n(mass.rows()) {
    if (mass.rows() != mass.cols() || stiffness.rows() != n || stiffness.cols() != n) {
      throw InvalidArgument("spatial system: M_x and A_x must be square and of equal size");
    }
    if (n == 0) {
      throw InvalidArgument("spatial system: empty matrices");
    }
    // Union pattern: structural entries of either matrix are kept.
    using ColMajor = Eigen::SparseMatrix<Real, Eigen::ColMajor, int>;
    const ColMajor m_union = ColMajor(mass) + 0.0 * ColMajor(stiffness);
    const ColMajor a_union = ColMajor(stiffness) + 0.0 * ColMajor(mass);

    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> pinv;
    Eigen::AMDOrdering<int> amd;
    amd(m_union, pinv);
    const Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm = pinv.inverse();
    new_index.assign(perm.indices().data(), perm.indices().data() + n);

    col_ptr.assign(n + 1, 0);
    for (int j = 0; j < n; ++j) {
      for (ColMajor::InnerIterator it(m_union, j); it; ++it) {
        const int ni = new_index[it.row()];
        const int nj = new_index[j];
        if (ni <= nj) {
          ++col_ptr[nj + 1];
        }
      }
    }
    for (Index k = 0; k < n; ++k) {
      col_ptr[k + 1] += col_ptr[k];
    }
    row_idx.resize(col_ptr[n]);
    mass_val.resize(col_ptr[n]);
    stiff_val.resize(col_ptr[n]);
    std::vector<int> next(col_ptr.begin(), col_ptr.end() - 1);
    for (int j = 0; j < n; ++j) {
      ColMajor::InnerIterator mit(m_union, j);
      ColMajor::InnerIterator ait(a_union, j);
      for (; mit; ++mit, ++ait) {
        const int ni = new_index[mit.row()];
        const int nj = new_index[j];
        if (ni <= nj) {
          const int slot = next[nj]++;
          row_idx[slot] = ni;
          mass_val[slot] = mit.value();
          stiff_val[slot] = ait.value();
        }
      }
    }
    for (int j = 0; j < n; ++j) {
      Real ms = 0.0;
      Real as = 0.0;
      for (ColMajor::InnerIterator it(m_union, j); it; ++it) {
        ms += std::abs(it.value());
      }
      for (ColMajor::InnerIterator it(a_union, j); it; ++it) {
        as += std::abs(it.value());
      }
      mass_norm1 = std::max(mass_norm1, ms);
      stiff_norm1 = std::max(stiff_norm1, as);
    }

    // Elimination tree and column counts of L.
    parent.assign(n, -1);
    std::vector<int> flag(n, -1);
    std::vector<int> count(n, 0);
    for (int k = 0; k < n; ++k) {
      flag[k] = k;
      for (int p = col_ptr[k]; p < col_ptr[k + 1]; ++p) {
        for (int i = row_idx[p]; i < k && flag[i] != k; i = parent[i]) {
          if (parent[i] == -1) {
            parent[i] = k;
          }
          ++count[i];
          flag[i] = k;
        }
      }
    }
    l_ptr.assign(n + 1, 0);
    for (Index k = 0; k < n; ++k) {
      l_ptr[k + 1] = l_ptr[k] + count[k];
    }
  }
};

} // namespace detail

/**
 * @brief LDL^T factorization of the complex symmetric K = M_x + lambda A_x.
 *
 * No pivoting is needed: x^H K x = m + lambda a with m, a > 0, so every
 * leading principal block is regular unless lambda is a negative real.
 * Immutable after construction; concurrent solves are safe.
 */
class SpatialFactorization {
public:
  SpatialFactorization(std::shared_ptr<const detail::SpatialSymbolic> symbolic, Complex shift,
                       Real pivot_tol = 1e-13)
      : sym_(std::move(symbolic)), shift_(shift) {
    const auto& s = *sym_;
    const Index n = s.n;
    l_rows_.resize(s.l_ptr[n]);
    l_vals_.resize(s.l_ptr[n]);
    diag_.resize(n);
    norm1_ = s.mass_norm1 + std::abs(shift) * s.stiff_norm1;

    std::vector<Complex> y(n, Complex{0.0});
    std::vector<int> pattern(n);
    std::vector<int> flag(n, -1);
    std::vector<int> fill(n, 0);
    const Real threshold = pivot_tol * norm1_;

    for (int k = 0; k < n; ++k) {
      int top = static_cast<int>(n);
      flag[k] = k;
      for (int p = s.col_ptr[k]; p < s.col_ptr[k + 1]; ++p) {
        int i = s.row_idx[p];
        y[i] += s.mass_val[p] + shift * s.stiff_val[p];
        int len = 0;
        for (; flag[i] != k; i = s.parent[i]) {
          pattern[len++] = i;
          flag[i] = k;
        }
        while (len > 0) {
          pattern[--top] = pattern[--len];
        }
      }
      Complex d = y[k];
      y[k] = 0.0;
      for (; top < n; ++top) {
        const int i = pattern[top];
        const Complex yi = y[i];
        y[i] = 0.0;
        const int end = s.l_ptr[i] + fill[i];
        for (int p = s.l_ptr[i]; p < end; ++p) {
          y[l_rows_[p]] -= l_vals_[p] * yi;
        }
        const Complex l_ki = yi / diag_[i];
        d -= l_ki * yi;
        l_rows_[end] = k;
        l_vals_[end] = l_ki;
        ++fill[i];
      }
      if (!(std::abs(d) > threshold) || !std::isfinite(std::abs(d))) {
        std::ostringstream msg;
        msg << "spatial factorization: pivot collapse at row " << k << " for shift "
            << shift.real() << (shift.imag() < 0 ? " - " : " + ") << std::abs(shift.imag())
            << "i";
        throw FactorizationError(msg.str(), shift);
      }
      diag_[k] = d;
    }
  }

  Index size() const noexcept { return sym_->n; }
  Complex shift() const noexcept { return shift_; }
  /// ||K||_1 upper bound (||M||_1 + |lambda| ||A||_1).
  Real norm1_bound() const noexcept { return norm1_; }

  /// Column pointers and row indices of L (permuted ordering).
  const std::vector<int>& factor_column_pointers() const noexcept { return sym_->l_ptr; }
  const std::vector<int>& factor_row_indices() const noexcept { return l_rows_; }

  template <class Rhs>
  ComplexVector solve(const Eigen::MatrixBase<Rhs>& b) const {
    const auto& s = *sym_;
    const Index n = s.n;
    if (b.size() != n) {
      throw InvalidArgument("spatial solve: right-hand side has length " +
                            std::to_string(b.size()) + ", expected " + std::to_string(n));
    }
    ComplexVector x(n);
    for (Index i = 0; i < n; ++i) {
      x[s.new_index[i]] = b[i];
    }
    for (Index j = 0; j < n; ++j) {
      const Complex xj = x[j];
      for (int p = s.l_ptr[j]; p < s.l_ptr[j + 1]; ++p) {
        x[l_rows_[p]] -= l_vals_[p] * xj;
      }
    }
    for (Index j = 0; j < n; ++j) {
      x[j] /= diag_[j];
    }
    for (Index j = n - 1; j >= 0; --j) {
      Complex sum = x[j];
      for (int p = s.l_ptr[j]; p < s.l_ptr[j + 1]; ++p) {
        sum -= l_vals_[p] * x[l_rows_[p]];
      }
      x[j] = sum;
    }
    ComplexVector out(n);
    for (Index i = 0; i < n; ++i) {
      out[i] = x[s.new_index[i]];
    }
    return out;
  }

private:
  std::shared_ptr<const detail::SpatialSymbolic> sym_;
  Complex shift_;
  Real norm1_ = 0.0;
  std::vector<int> l_rows_;
  std::vector<Complex> l_vals_;
  std::vector<Complex> diag_;
};

/// The pair (M_x, A_x) with its fill-reducing ordering, computed once and
/// reused for every shift.
class SpatialSystem {
public:
  SpatialSystem(const SparseRealMatrix& mass, const SparseRealMatrix& stiffness)
      : sym_(std::make_shared<const detail::SpatialSymbolic>(mass, stiffness)) {}

  Index size() const noexcept { return sym_->n; }
  Index factor_nonzeros() const noexcept { return sym_->l_ptr.back(); }

  SpatialFactorization factor(Complex shift) const { return SpatialFactorization(sym_, shift); }

private:
  std::shared_ptr<const detail::SpatialSymbolic> sym_;
};

/// One-off factorization of M_x + lambda A_x.
inline SpatialFactorization factor(const SparseRealMatrix& mass, const SparseRealMatrix& stiffness,
                                   Complex shift) {
  return SpatialSystem(mass, stiffness).factor(shift);
}

} // namespace stcg
