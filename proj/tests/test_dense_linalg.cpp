#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "stcg/dense_linalg.hpp"
#include "stcg/fem_assembly.hpp"
#include "test_support.hpp"

using namespace stcg;
using stcg::testing::random_complex_matrix;

namespace {

DenseComplexMatrix core_for(const TemporalMesh& mesh) {
  const TemporalMatrices t = assemble_temporal(mesh);
  return form_temporal_core(t.mass, t.derivative);
}

Real unitarity_defect(const DenseComplexMatrix& z) {
  return (z.adjoint() * z - DenseComplexMatrix::Identity(z.rows(), z.cols())).norm();
}

Real strictly_lower_norm(const DenseComplexMatrix& t) {
  DenseComplexMatrix lower = t;
  lower.triangularView<Eigen::Upper>().setZero();
  return lower.norm();
}

bool sorted_by_real_then_imag(const DenseComplexMatrix& s) {
  for (Index k = 1; k < s.rows(); ++k) {
    const Complex a = s(k - 1, k - 1);
    const Complex b = s(k, k);
    if (a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag())) return false;
  }
  return true;
}

} // namespace

TEST(DenseSolve, SmallExample) {
  DenseComplexMatrix a(2, 2);
  a << Complex(0, 1), 2.0, 1.0, Complex(1, -1);
  DenseComplexMatrix b(2, 1);
  b << 1.0, Complex(0, 2);
  const DenseComplexMatrix x = dense_solve(a, b);
  EXPECT_LT((a * x - b).norm(), 1e-15);
}

TEST(DenseSolve, RandomSystemResidual) {
  const DenseComplexMatrix a = random_complex_matrix(8, 21);
  const DenseComplexMatrix b = random_complex_matrix(8, 22);
  const DenseComplexMatrix x = dense_solve(a, b);
  EXPECT_LT((a * x - b).norm() / (a.norm() * x.norm()), 1e-14);
}

TEST(DenseSolve, SingularMatrixThrows) {
  DenseComplexMatrix a(2, 2);
  a << 1.0, 2.0, 2.0, 4.0;
  EXPECT_THROW(dense_solve(a, DenseComplexMatrix::Identity(2, 2)), DecompositionError);
  EXPECT_THROW(dense_solve(a, DenseComplexMatrix::Identity(3, 3)), InvalidArgument);
}

TEST(TemporalCore, SingleIntervalIsScalar) {
  const Real h = 0.9;
  const DenseComplexMatrix c = core_for(uniform_temporal_mesh(h, 1));
  ASSERT_EQ(c.rows(), 1);
  EXPECT_NEAR(std::abs(c(0, 0) - Complex(0.0, -2.0 * h / 3.0)), 0.0, 1e-15);
}

TEST(TemporalCore, EqualMassAndDerivativeGivesMinusI) {
  const SparseRealMatrix b = assemble_temporal(uniform_temporal_mesh(1.0, 4)).derivative;
  const DenseComplexMatrix c = form_temporal_core(b, b);
  EXPECT_LT((c + kI * DenseComplexMatrix::Identity(4, 4)).norm(), 1e-14);
}

TEST(TemporalCore, TwoIntervalsSatisfyDefiningRelation) {
  const TemporalMatrices t = assemble_temporal(uniform_temporal_mesh(1.0, 2));
  const DenseComplexMatrix c = form_temporal_core(t.mass, t.derivative);
  const DenseComplexMatrix ib = kI * Eigen::MatrixXd(t.derivative).cast<Complex>();
  const DenseComplexMatrix m = Eigen::MatrixXd(t.mass).cast<Complex>();
  EXPECT_LT((ib * c - m).norm(), 1e-15);
  EXPECT_LT((inverse_i_derivative(t.derivative) * ib - DenseComplexMatrix::Identity(2, 2)).norm(),
            1e-15);
}

TEST(SchurDecompose, IdentityIsTrivial) {
  const TemporalFactors f = schur_decompose(DenseComplexMatrix::Identity(3, 3));
  EXPECT_LT(unitarity_defect(f.transform), 1e-15);
  EXPECT_LT((f.triangular - DenseComplexMatrix::Identity(3, 3)).norm(), 1e-15);
  EXPECT_EQ(f.kappa2, 1.0);
}

TEST(SchurDecompose, NilpotentBlockStaysTriangular) {
  DenseComplexMatrix a = DenseComplexMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  const TemporalFactors f = schur_decompose(a);
  EXPECT_LT(decomposition_residual(a, f), 1e-15);
  EXPECT_LT(f.triangular.diagonal().norm(), 1e-15);
  EXPECT_NEAR(std::abs(f.triangular(0, 1)), 1.0, 1e-15);
}

class RandomSchur : public ::testing::TestWithParam<int> {};

TEST_P(RandomSchur, ResidualUnitarityTriangularityAndOrdering) {
  const int n = GetParam();
  const DenseComplexMatrix a = random_complex_matrix(n, 100 + n);
  const TemporalFactors f = schur_decompose(a);
  EXPECT_LT(decomposition_residual(a, f), 1e-13);
  EXPECT_LT(unitarity_defect(f.transform), 1e-13);
  EXPECT_EQ(strictly_lower_norm(f.triangular), 0.0);
  EXPECT_TRUE(sorted_by_real_then_imag(f.triangular));
}

INSTANTIATE_TEST_SUITE_P(Sizes, RandomSchur, ::testing::Values(2, 5, 16, 64));

TEST(SchurDecompose, TemporalCoresOfUniformAndGradedMeshes) {
  for (const TemporalMesh& mesh :
       {uniform_temporal_mesh(5.0, 64), graded_temporal_mesh(5.0, 64, 1.5), uniform_temporal_mesh(5.0, 256)}) {
    const DenseComplexMatrix c = core_for(mesh);
    const TemporalFactors f = schur_decompose(c);
    EXPECT_LT(decomposition_residual(c, f), 1e-12);
    EXPECT_LT(unitarity_defect(f.transform), 1e-12);
    EXPECT_TRUE(sorted_by_real_then_imag(f.triangular));
  }
}

TEST(SchurDecompose, LoadTransformIsAdjointTimesRight) {
  const DenseComplexMatrix a = random_complex_matrix(6, 5);
  const DenseComplexMatrix r = random_complex_matrix(6, 6);
  const TemporalFactors f = schur_decompose(a, r);
  EXPECT_LT((f.load_transform - f.transform.adjoint() * r).norm(), 1e-14);
}

TEST(EigenDecompose, DiagonalMatrix) {
  DenseComplexMatrix a = DenseComplexMatrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = Complex(0.0, 3.0);
  const TemporalFactors f = eigen_decompose(a);
  // Ascending real part puts 3i first.
  EXPECT_LT(std::abs(f.triangular(0, 0) - Complex(0.0, 3.0)), 1e-15);
  EXPECT_LT(std::abs(f.triangular(1, 1) - 2.0), 1e-15);
  EXPECT_NEAR(f.kappa2, 1.0, 1e-14);
  EXPECT_LT(decomposition_residual(a, f), 1e-15);
}

TEST(EigenDecompose, SingleIntervalCondition) {
  const TemporalFactors f = eigen_decompose(core_for(uniform_temporal_mesh(1.0, 1)));
  EXPECT_EQ(f.kappa2, 1.0);
  EXPECT_EQ(f.transform(0, 0), Complex(1.0));
}

TEST(EigenDecompose, InitialExperimentCondition) {
  // Reference value from an independent eigensolver on the same core.
  const TemporalFactors f = eigen_decompose(core_for(uniform_temporal_mesh(5.0, 64)));
  EXPECT_NEAR(f.kappa2, 229.3357728, 1e-4);
}

TEST(EigenDecompose, JordanBlockIsRejected) {
  DenseComplexMatrix a = DenseComplexMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(eigen_decompose(a), NotDiagonalizableError);
}

TEST(EigenDecompose, AgreesWithSchurEigenvalues) {
  for (int n : {3, 17, 64}) {
    const DenseComplexMatrix a = random_complex_matrix(n, 300 + n);
    const TemporalFactors s = schur_decompose(a);
    const TemporalFactors e = eigen_decompose(a);
    EXPECT_LT((s.triangular.diagonal() - e.triangular.diagonal()).norm(), 1e-12 * a.norm());
    EXPECT_LT(decomposition_residual(a, e), 1e-11);
    EXPECT_TRUE(sorted_by_real_then_imag(e.triangular));
    for (Index k = 0; k < n; ++k) {
      EXPECT_NEAR(e.transform.col(k).norm(), 1.0, 1e-14);
      // First entry above the cutoff is real and positive.
      for (Index i = 0; i < n; ++i) {
        if (std::abs(e.transform(i, k)) > 1e-14) {
          EXPECT_EQ(e.transform(i, k).imag(), 0.0);
          EXPECT_GT(e.transform(i, k).real(), 0.0);
          break;
        }
      }
    }
  }
}

TEST(EigenDecompose, LoadTransformInvertsTransform) {
  const DenseComplexMatrix c = core_for(graded_temporal_mesh(5.0, 32, 1.5));
  const TemporalFactors e = eigen_decompose(c);
  EXPECT_LT((e.transform * e.load_transform - DenseComplexMatrix::Identity(32, 32)).norm(), 1e-10);
}

TEST(EigenDecompose, ConditionIsInvariantUnderTerminalTime) {
  // Scaling T scales M_t and leaves B_t fixed, so C scales and X does not.
  for (Index nt : {16, 64, 128}) {
    const Real reference = eigen_decompose(core_for(uniform_temporal_mesh(1.0, nt))).kappa2;
    for (Real t : {5.0, 10.0}) {
      EXPECT_NEAR(eigen_decompose(core_for(uniform_temporal_mesh(t, nt))).kappa2, reference,
                  1e-6 * reference);
    }
  }
}

TEST(EigenDecompose, UniformCoresDiagonalizableUpTo1024) {
  Real previous = 0.0;
  for (Index nt : {64, 128, 256, 512, 1024}) {
    const DenseComplexMatrix c = core_for(uniform_temporal_mesh(5.0, nt));
    TemporalFactors f;
    ASSERT_NO_THROW(f = eigen_decompose(c)) << "n_t=" << nt;
    EXPECT_TRUE(std::isfinite(f.kappa2));
    EXPECT_GE(f.kappa2, previous);
    previous = f.kappa2;
    if (nt <= 512) EXPECT_LT(decomposition_residual(c, f), 1e-9);
  }
}

TEST(SpectralCondition, Examples) {
  DenseComplexMatrix d = DenseComplexMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  EXPECT_NEAR(spectral_condition(d), 3.0, 1e-15);

  DenseComplexMatrix j(2, 2);
  j << 1.0, 1.0, 0.0, 1.0;
  EXPECT_NEAR(spectral_condition(j), (3.0 + std::sqrt(5.0)) / 2.0, 1e-14);

  const DenseComplexMatrix z = schur_decompose(random_complex_matrix(10, 9)).transform;
  EXPECT_NEAR(spectral_condition(z), 1.0, 1e-13);

  EXPECT_TRUE(std::isinf(spectral_condition(DenseComplexMatrix::Zero(2, 2))));
}
