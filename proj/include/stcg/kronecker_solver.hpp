#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "stcg/dense_linalg.hpp"
#include "stcg/fem_assembly.hpp"
#include "stcg/parallel.hpp"
#include "stcg/spatial_solver.hpp"
#include "stcg/types.hpp"

namespace stcg {

enum class SolverVariant { BartelsStewart, FastDiagonalization };

inline const char* to_string(SolverVariant v) {
  return v == SolverVariant::BartelsStewart ? "bs" : "fd";
}

struct SolverOptions {
  SolverVariant variant = SolverVariant::BartelsStewart;
  int threads = 1;
};

/// Wall-clock seconds per solver step.
struct StepTimings {
  double decomposition = 0.0; ///< step 1
  double load_transform = 0.0; ///< step 2
  double spatial_solves = 0.0; ///< step 3
  double back_transform = 0.0; ///< step 4
};

struct SolveReport {
  BlockVector solution;
  double solve_seconds = 0.0; ///< steps 1-4, excludes assembly and the residual check
  StepTimings steps;
  Real kappa2 = 1.0;
  Real relative_residual = 0.0;
};

/// out_l = sum_k T[l,k] v_k, i.e. V T^T with V the n_x x n_t block matrix.
inline BlockVector transform_blocks(const DenseComplexMatrix& t, const BlockVector& v) {
  if (t.rows() != v.temporal_dofs() || t.cols() != v.temporal_dofs()) {
    throw InvalidArgument("transform_blocks: transform is " + std::to_string(t.rows()) + "x" +
                          std::to_string(t.cols()) + " but vector has " +
                          std::to_string(v.temporal_dofs()) + " blocks");
  }
  BlockVector out(v.spatial_dofs(), v.temporal_dofs());
  out.as_matrix().noalias() = v.as_matrix() * t.transpose();
  return out;
}

/// Matrix-free (i B_t (x) M_x + M_t (x) A_x) v.
inline BlockVector apply_global(const SparseRealMatrix& mass_x, const SparseRealMatrix& stiff_x,
                                const SparseRealMatrix& mass_t, const SparseRealMatrix& deriv_t,
                                const BlockVector& v) {
  const Index nx = v.spatial_dofs();
  const Index nt = v.temporal_dofs();
  if (mass_x.rows() != nx || stiff_x.rows() != nx || mass_t.rows() != nt ||
      deriv_t.rows() != nt) {
    throw InvalidArgument("apply_global: matrix and vector dimensions disagree");
  }
  const auto vm = v.as_matrix();
  const Eigen::MatrixXcd mv = mass_x.cast<Complex>() * vm;
  const Eigen::MatrixXcd av = stiff_x.cast<Complex>() * vm;
  BlockVector out(nx, nt);
  // Block l gathers B_t[l,k] (M v_k), i.e. (M V) B_t^T.
  const Eigen::SparseMatrix<Complex, Eigen::ColMajor, int> bt = deriv_t.cast<Complex>().transpose();
  const Eigen::SparseMatrix<Complex, Eigen::ColMajor, int> mt = mass_t.cast<Complex>().transpose();
  out.as_matrix().noalias() = kI * (mv * bt);
  out.as_matrix().noalias() += av * mt;
  return out;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace detail

/**
 * @brief Solves (i B_t (x) M_x + M_t (x) A_x) psi = f with the Kronecker
 * product solver.
 *
 *  1. Decompose (i B_t)^{-1} M_t = X S X^{-1} (Schur or eigen).
 *  2. g = (Y (x) I) f with Y = X^{-1} (i B_t)^{-1}.
 *  3. For l = n_t..1: (M_x + S[l,l] A_x) w_l = g_l - sum_{k>l} S[l,k] A_x w_k.
 *  4. psi = (X (x) I) w.
 *
 * Bartels-Stewart runs step 3 as a sequential backward sweep that holds one
 * factorization at a time. Fast diagonalization has a diagonal S, so the
 * n_t shifted systems are independent and are factored and solved on up to
 * options.threads workers.
 */
inline SolveReport solve_spacetime(const SparseRealMatrix& mass_x, const SparseRealMatrix& stiff_x,
                                   const SparseRealMatrix& mass_t, const SparseRealMatrix& deriv_t,
                                   const BlockVector& rhs, const SolverOptions& options = {}) {
  const Index nx = mass_x.rows();
  const Index nt = mass_t.rows();
  if (rhs.spatial_dofs() != nx || rhs.temporal_dofs() != nt) {
    throw InvalidArgument("solve: right-hand side layout does not match the matrices");
  }
  if (options.threads < 1) {
    throw InvalidArgument("solve: thread budget must be at least 1");
  }
  if (!rhs.data().allFinite()) {
    throw InvalidArgument("solve: right-hand side has non-finite entries");
  }

  SolveReport report;
  const auto start = detail::Clock::now();

  auto t0 = detail::Clock::now();
  const DenseComplexMatrix core = form_temporal_core(mass_t, deriv_t);
  const DenseComplexMatrix ib_inverse = inverse_i_derivative(deriv_t);
  const TemporalFactors factors = options.variant == SolverVariant::BartelsStewart
                                      ? schur_decompose(core, ib_inverse)
                                      : eigen_decompose(core, ib_inverse);
  const SpatialSystem system(mass_x, stiff_x);
  report.steps.decomposition = detail::seconds_since(t0);
  report.kappa2 = factors.kappa2;

  t0 = detail::Clock::now();
  const BlockVector g = transform_blocks(factors.load_transform, rhs);
  report.steps.load_transform = detail::seconds_since(t0);

  t0 = detail::Clock::now();
  BlockVector w(nx, nt);
  const DenseComplexMatrix& s = factors.triangular;
  const auto factor_at = [&](Index l) {
    try {
      return system.factor(s(l, l));
    } catch (const FactorizationError& e) {
      throw FactorizationError("temporal index " + std::to_string(l + 1) + ": " + e.what(),
                               e.shift());
    }
  };
  if (options.variant == SolverVariant::BartelsStewart) {
    const Eigen::SparseMatrix<Complex, Eigen::RowMajor, int> stiff_c = stiff_x.cast<Complex>();
    // pending.col(l) accumulates sum_{k>l} S[l,k] A_x w_k.
    Eigen::MatrixXcd pending = Eigen::MatrixXcd::Zero(nx, nt);
    ComplexVector aw(nx);
    for (Index l = nt - 1; l >= 0; --l) {
      const ComplexVector rhs_l = g.block(l) - pending.col(l);
      w.block(l) = factor_at(l).solve(rhs_l);
      if (l > 0) {
        aw.noalias() = stiff_c * w.block(l);
        pending.leftCols(l).noalias() += aw * s.col(l).head(l).transpose();
      }
    }
  } else {
    parallel_for(nt, options.threads, [&](Index l) {
      w.block(l) = factor_at(l).solve(g.block(l));
    });
  }
  report.steps.spatial_solves = detail::seconds_since(t0);

  t0 = detail::Clock::now();
  report.solution = transform_blocks(factors.transform, w);
  report.steps.back_transform = detail::seconds_since(t0);
  report.solve_seconds = detail::seconds_since(start);

  const BlockVector residual = apply_global(mass_x, stiff_x, mass_t, deriv_t, report.solution);
  const Real rhs_norm = rhs.data().norm();
  const Real res_norm = (residual.data() - rhs.data()).norm();
  report.relative_residual = rhs_norm > 0.0 ? res_norm / rhs_norm : res_norm;
  return report;
}

} // namespace stcg
