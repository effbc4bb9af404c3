#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "stcg/types.hpp"

namespace stcg {

enum class DecompositionKind { Schur, Eigen };

/**
 * @brief Factors of the temporal core C = (i B_t)^{-1} M_t = X S X^{-1}.
 *
 * For the Schur variant X is unitary and S upper triangular; for the eigen
 * variant X holds unit-norm eigenvectors and S is diagonal. Y is
 * X^{-1} R, where R is the right factor handed to the decomposition
 * (normally (i B_t)^{-1}).
 */
struct TemporalFactors {
  DenseComplexMatrix transform;     ///< X_t
  DenseComplexMatrix triangular;    ///< S_t
  DenseComplexMatrix load_transform; ///< Y_t
  DecompositionKind kind = DecompositionKind::Schur;
  Real kappa2 = 1.0;
};

/// Solves A X = B by LU with partial pivoting. A pivot of modulus at most
/// pivot_tol * ||A||_F raises DecompositionError.
inline DenseComplexMatrix dense_solve(const DenseComplexMatrix& a, const DenseComplexMatrix& b,
                                      Real pivot_tol = 1e-14) {
  const Index n = a.rows();
  if (a.cols() != n || b.rows() != n) {
    throw InvalidArgument("dense_solve: nonconforming dimensions");
  }
  DenseComplexMatrix lu = a;
  DenseComplexMatrix x = b;
  const Real threshold = pivot_tol * a.norm();
  for (Index k = 0; k < n; ++k) {
    Index pivot = k;
    lu.col(k).tail(n - k).cwiseAbs().maxCoeff(&pivot);
    pivot += k;
    if (!(std::abs(lu(pivot, k)) > threshold)) {
      throw DecompositionError("dense_solve: singular pivot in column " + std::to_string(k));
    }
    if (pivot != k) {
      lu.row(k).swap(lu.row(pivot));
      x.row(k).swap(x.row(pivot));
    }
    const Index rest = n - k - 1;
    if (rest > 0) {
      lu.col(k).tail(rest) /= lu(k, k);
      lu.bottomRightCorner(rest, rest).noalias() -=
          lu.col(k).tail(rest) * lu.row(k).tail(rest);
      x.bottomRows(rest).noalias() -= lu.col(k).tail(rest) * x.row(k);
    }
  }
  lu.triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

/// C = (i B_t)^{-1} M_t = -i B_t^{-1} M_t.
inline DenseComplexMatrix form_temporal_core(const SparseRealMatrix& mass,
                                             const SparseRealMatrix& derivative) {
  if (mass.rows() != derivative.rows() || mass.cols() != derivative.cols() ||
      mass.rows() != mass.cols()) {
    throw InvalidArgument("form_temporal_core: temporal matrices must be square and equal size");
  }
  const DenseComplexMatrix b = Eigen::MatrixXd(derivative).cast<Complex>();
  const DenseComplexMatrix m = Eigen::MatrixXd(mass).cast<Complex>();
  try {
    return -kI * dense_solve(b, m);
  } catch (const DecompositionError& e) {
    throw DecompositionError(std::string("temporal derivative matrix is singular: ") + e.what());
  }
}

/// (i B_t)^{-1}.
inline DenseComplexMatrix inverse_i_derivative(const SparseRealMatrix& derivative) {
  const Index n = derivative.rows();
  const DenseComplexMatrix b = Eigen::MatrixXd(derivative).cast<Complex>();
  return -kI * dense_solve(b, DenseComplexMatrix::Identity(n, n));
}

/// sigma_max / sigma_min; +infinity for an exactly singular matrix.
inline Real spectral_condition(const DenseComplexMatrix& x) {
  if (x.rows() != x.cols() || x.rows() == 0) {
    throw InvalidArgument("spectral_condition: matrix must be square and nonempty");
  }
  const Eigen::VectorXd sv = Eigen::BDCSVD<DenseComplexMatrix>(x).singularValues();
  const Real smin = sv.minCoeff();
  if (smin == 0.0) {
    return std::numeric_limits<Real>::infinity();
  }
  return sv.maxCoeff() / smin;
}

namespace detail {

inline bool eigenvalue_less(Complex a, Complex b) {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

/// Swaps the adjacent diagonal entries k, k+1 of the upper triangular T by a
/// unitary rotation, updating the Schur vectors Z.
inline void swap_schur_pair(DenseComplexMatrix& t, DenseComplexMatrix& z, Index k) {
  const Complex t11 = t(k, k);
  const Complex t22 = t(k + 1, k + 1);
  // (t12, t22 - t11) is an eigenvector of the 2x2 block for t22.
  const Complex x0 = t(k, k + 1);
  const Complex x1 = t22 - t11;
  const Real r = std::hypot(std::abs(x0), std::abs(x1));
  if (r == 0.0) {
    return;
  }
  const Complex c = x0 / r;
  const Complex s = x1 / r;
  // Q = [c, -conj(s); s, conj(c)].
  const Index n = t.rows();
  for (Index i = 0; i <= k + 1; ++i) {
    const Complex a = t(i, k);
    const Complex b = t(i, k + 1);
    t(i, k) = a * c + b * s;
    t(i, k + 1) = -a * std::conj(s) + b * std::conj(c);
  }
  for (Index j = k; j < n; ++j) {
    const Complex a = t(k, j);
    const Complex b = t(k + 1, j);
    t(k, j) = std::conj(c) * a + std::conj(s) * b;
    t(k + 1, j) = -s * a + c * b;
  }
  for (Index i = 0; i < n; ++i) {
    const Complex a = z(i, k);
    const Complex b = z(i, k + 1);
    z(i, k) = a * c + b * s;
    z(i, k + 1) = -a * std::conj(s) + b * std::conj(c);
  }
  t(k + 1, k) = 0.0;
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
}

/// Complex Schur form A = Z T Z^H with diag(T) ascending by real part,
/// ties by imaginary part.
inline std::pair<DenseComplexMatrix, DenseComplexMatrix> sorted_schur(const DenseComplexMatrix& a) {
  if (!a.allFinite()) {
    throw InvalidArgument("schur: matrix has non-finite entries");
  }
  Eigen::ComplexSchur<DenseComplexMatrix> schur(a.rows());
  schur.setMaxIterations(60 * std::max<Index>(a.rows(), 1));
  schur.compute(a, true);
  if (schur.info() != Eigen::Success) {
    throw DecompositionError("schur: QR iteration did not converge within " +
                             std::to_string(schur.getMaxIterations()) + " iterations");
  }
  DenseComplexMatrix t = schur.matrixT();
  DenseComplexMatrix z = schur.matrixU();
  t.triangularView<Eigen::StrictlyLower>().setZero();
  const Index n = t.rows();
  for (Index end = n - 1; end > 0; --end) {
    bool swapped = false;
    for (Index k = 0; k < end; ++k) {
      if (eigenvalue_less(t(k + 1, k + 1), t(k, k))) {
        swap_schur_pair(t, z, k);
        swapped = true;
      }
    }
    if (!swapped) {
      break;
    }
  }
  return {std::move(z), std::move(t)};
}

} // namespace detail

/// Bartels-Stewart factors: unitary X, upper triangular S, Y = X^H R.
inline TemporalFactors schur_decompose(const DenseComplexMatrix& core,
                                       const DenseComplexMatrix& right) {
  auto [z, t] = detail::sorted_schur(core);
  TemporalFactors f;
  f.load_transform = z.adjoint() * right;
  f.transform = std::move(z);
  f.triangular = std::move(t);
  f.kind = DecompositionKind::Schur;
  f.kappa2 = 1.0;
  return f;
}

inline TemporalFactors schur_decompose(const DenseComplexMatrix& core) {
  return schur_decompose(core, DenseComplexMatrix::Identity(core.rows(), core.cols()));
}

/**
 * @brief Fast-diagonalization factors: unit-norm eigenvectors X, S = diag.
 *
 * Eigenvectors come from back substitution on the sorted Schur form. Each
 * column is scaled to unit 2-norm with its first nonzero entry real and
 * positive. Throws NotDiagonalizableError when sigma_min(X) < 1e-12.
 */
inline TemporalFactors eigen_decompose(const DenseComplexMatrix& core,
                                       const DenseComplexMatrix& right,
                                       Real defect_tol = 1e-12) {
  const auto [z, t] = detail::sorted_schur(core);
  const Index n = t.rows();
  const Real small = std::max(std::numeric_limits<Real>::epsilon() * t.norm(),
                              std::numeric_limits<Real>::min());

  DenseComplexMatrix v = DenseComplexMatrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    const Complex lambda = t(k, k);
    v(k, k) = 1.0;
    for (Index i = k - 1; i >= 0; --i) {
      Complex sum = 0.0;
      for (Index j = i + 1; j <= k; ++j) {
        sum += t(i, j) * v(j, k);
      }
      Complex d = t(i, i) - lambda;
      if (std::abs(d) < small) {
        d = small;
      }
      v(i, k) = -sum / d;
    }
  }

  DenseComplexMatrix x = z * v.triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    auto col = x.col(k);
    const Real norm = col.norm();
    if (norm == 0.0 || !std::isfinite(norm)) {
      throw NotDiagonalizableError("eigen_decompose: eigenvector " + std::to_string(k) +
                                   " could not be formed");
    }
    col /= norm;
    for (Index i = 0; i < n; ++i) {
      const Real mag = std::abs(col[i]);
      if (mag > 1e-14) {
        col *= std::conj(col[i]) / mag;
        col[i] = mag;
        break;
      }
    }
  }

  const Eigen::VectorXd sv = Eigen::BDCSVD<DenseComplexMatrix>(x).singularValues();
  const Real smin = sv.minCoeff();
  if (smin < defect_tol) {
    throw NotDiagonalizableError(
        "eigen_decompose: eigenvector matrix is numerically singular (sigma_min = " +
        std::to_string(smin) + "); use the Bartels-Stewart variant");
  }

  TemporalFactors f;
  f.triangular = DenseComplexMatrix::Zero(n, n);
  f.triangular.diagonal() = t.diagonal();
  f.load_transform = dense_solve(x, right);
  f.transform = std::move(x);
  f.kind = DecompositionKind::Eigen;
  f.kappa2 = sv.maxCoeff() / smin;
  return f;
}

inline TemporalFactors eigen_decompose(const DenseComplexMatrix& core) {
  return eigen_decompose(core, DenseComplexMatrix::Identity(core.rows(), core.cols()));
}

/// ||C - X S X^{-1}||_F / ||C||_F.
inline Real decomposition_residual(const DenseComplexMatrix& core, const TemporalFactors& f) {
  const DenseComplexMatrix xs = f.transform * f.triangular;
  DenseComplexMatrix recon;
  if (f.kind == DecompositionKind::Schur) {
    recon = xs * f.transform.adjoint();
  } else {
    // X S X^{-1} = (X^{-H} (X S)^H)^H
    recon = dense_solve(f.transform.adjoint(), xs.adjoint()).adjoint();
  }
  const Real scale = core.norm();
  return scale > 0.0 ? (core - recon).norm() / scale : (core - recon).norm();
}

} // namespace stcg
