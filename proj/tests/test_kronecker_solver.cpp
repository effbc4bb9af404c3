#include <gtest/gtest.h>

#include "stcg/fem_assembly.hpp"
#include "stcg/kronecker_solver.hpp"
#include "test_support.hpp"

using namespace stcg;
using stcg::testing::dense_global_matrix;
using stcg::testing::random_complex;
using stcg::testing::random_complex_matrix;
using stcg::testing::relative_error;

namespace {

struct Problem {
  SpatialMatrices x;
  TemporalMatrices t;
};

Problem make_problem(const SpatialMesh& mx, const TemporalMesh& mt) {
  return {assemble_spatial(mx), assemble_temporal(mt)};
}

SolveReport run(const Problem& p, const BlockVector& f, SolverVariant v, int threads = 1) {
  return solve_spacetime(p.x.mass, p.x.stiffness, p.t.mass, p.t.derivative, f, {v, threads});
}

ComplexVector dense_oracle(const Problem& p, const BlockVector& f) {
  const DenseComplexMatrix g =
      dense_global_matrix(p.x.mass, p.x.stiffness, p.t.mass, p.t.derivative);
  return g.fullPivLu().solve(f.data());
}

const SolverVariant kVariants[] = {SolverVariant::BartelsStewart,
                                   SolverVariant::FastDiagonalization};

} // namespace

TEST(SolveSpacetime, OneByOneSystem) {
  const Problem p = make_problem(build_structured_square(2), uniform_temporal_mesh(1.0, 1));
  const BlockVector f(1, 1, ComplexVector::Ones(1));
  for (SolverVariant v : kVariants) {
    const SolveReport r = run(p, f, v);
    EXPECT_LT(std::abs(r.solution.data()[0] - 1.0 / Complex(4.0 / 3.0, 1.0 / 16.0)), 1e-15)
        << to_string(v);
    EXPECT_LT(r.relative_residual, 1e-15);
    EXPECT_EQ(r.kappa2, 1.0);
  }
}

TEST(SolveSpacetime, ZeroRightHandSide) {
  const Problem p = make_problem(build_structured_square(4), uniform_temporal_mesh(1.0, 5));
  const BlockVector f(9, 5);
  for (SolverVariant v : kVariants) {
    const SolveReport r = run(p, f, v);
    EXPECT_EQ(r.solution.data().norm(), 0.0);
    EXPECT_EQ(r.relative_residual, 0.0);
  }
}

TEST(SolveSpacetime, MatchesDenseOracleOnSmallSquare) {
  const Problem p = make_problem(build_structured_square(4), uniform_temporal_mesh(1.0, 4));
  const BlockVector f(9, 4, random_complex(36, 77));
  const ComplexVector expected = dense_oracle(p, f);
  for (SolverVariant v : kVariants) {
    const SolveReport r = run(p, f, v);
    EXPECT_LT(relative_error(r.solution.data(), expected), 1e-10) << to_string(v);
    EXPECT_LT(r.relative_residual, 1e-12);
    EXPECT_GE(r.solve_seconds, 0.0);
  }
}

struct OracleCase {
  bool square;
  int m;
  Index nt;
  bool graded;
};

class OracleGrid : public ::testing::TestWithParam<OracleCase> {};

TEST_P(OracleGrid, BothVariantsMatchDenseSolve) {
  const OracleCase c = GetParam();
  const SpatialMesh mx = c.square ? build_structured_square(c.m) : build_interval(c.m, 1.0);
  const TemporalMesh mt = c.graded ? graded_temporal_mesh(2.0, c.nt, 1.5) : uniform_temporal_mesh(2.0, c.nt);
  const Problem p = make_problem(mx, mt);
  const BlockVector f(mx.num_dofs(), c.nt, random_complex(mx.num_dofs() * c.nt, c.m * 31 + c.nt));
  const ComplexVector expected = dense_oracle(p, f);
  for (SolverVariant v : kVariants) {
    const SolveReport r = run(p, f, v);
    EXPECT_LT(relative_error(r.solution.data(), expected), 1e-10) << to_string(v);
  }
}

INSTANTIATE_TEST_SUITE_P(Small, OracleGrid,
                         ::testing::Values(OracleCase{false, 2, 1, false}, OracleCase{false, 6, 8, true},
                                           OracleCase{false, 5, 3, false}, OracleCase{true, 3, 7, true},
                                           OracleCase{true, 4, 8, false}, OracleCase{true, 2, 5, true}));

TEST(SolveSpacetime, VariantsAgree) {
  const Problem p = make_problem(build_structured_square(8), graded_temporal_mesh(5.0, 32, 1.5));
  const BlockVector f(49, 32, random_complex(49 * 32, 12));
  const SolveReport bs = run(p, f, SolverVariant::BartelsStewart);
  const SolveReport fd = run(p, f, SolverVariant::FastDiagonalization);
  EXPECT_LT(relative_error(fd.solution.data(), bs.solution.data()), 1e-10);
  EXPECT_LT(bs.relative_residual, 1e-8);
  EXPECT_LT(fd.relative_residual, 1e-8);
  EXPECT_GT(fd.kappa2, 1.0);
}

TEST(SolveSpacetime, BartelsStewartIsBitwiseReproducible) {
  const Problem p = make_problem(build_structured_square(6), uniform_temporal_mesh(5.0, 16));
  const BlockVector f(25, 16, random_complex(25 * 16, 3));
  const SolveReport a = run(p, f, SolverVariant::BartelsStewart);
  const SolveReport b = run(p, f, SolverVariant::BartelsStewart);
  EXPECT_EQ(a.solution.data(), b.solution.data());
}

TEST(SolveSpacetime, FastDiagonalizationIndependentOfThreadCount) {
  const Problem p = make_problem(build_structured_square(6), uniform_temporal_mesh(5.0, 24));
  const BlockVector f(25, 24, random_complex(25 * 24, 4));
  const SolveReport one = run(p, f, SolverVariant::FastDiagonalization, 1);
  for (int threads : {2, 3, 4, 8}) {
    const SolveReport many = run(p, f, SolverVariant::FastDiagonalization, threads);
    EXPECT_LT((many.solution.data() - one.solution.data()).norm(), 1e-12 * one.solution.data().norm());
  }
}

TEST(SolveSpacetime, RejectsBadInput) {
  const Problem p = make_problem(build_structured_square(3), uniform_temporal_mesh(1.0, 2));
  EXPECT_THROW(run(p, BlockVector(4, 3), SolverVariant::BartelsStewart), InvalidArgument);
  EXPECT_THROW(run(p, BlockVector(4, 2), SolverVariant::BartelsStewart, 0), InvalidArgument);
  ComplexVector bad = ComplexVector::Zero(8);
  bad[3] = std::numeric_limits<Real>::quiet_NaN();
  EXPECT_THROW(run(p, BlockVector(4, 2, bad), SolverVariant::FastDiagonalization), InvalidArgument);
}

TEST(ApplyGlobal, Examples) {
  const Problem one = make_problem(build_structured_square(2), uniform_temporal_mesh(1.0, 1));
  const BlockVector v(1, 1, ComplexVector::Ones(1));
  const BlockVector out = apply_global(one.x.mass, one.x.stiffness, one.t.mass, one.t.derivative, v);
  EXPECT_LT(std::abs(out.data()[0] - Complex(4.0 / 3.0, 1.0 / 16.0)), 1e-15);

  const Problem p = make_problem(build_structured_square(5), graded_temporal_mesh(3.0, 6, 2.0));
  const BlockVector zero(16, 6);
  EXPECT_EQ(apply_global(p.x.mass, p.x.stiffness, p.t.mass, p.t.derivative, zero).data().norm(), 0.0);

  const BlockVector r(16, 6, random_complex(96, 9));
  const ComplexVector expected =
      dense_global_matrix(p.x.mass, p.x.stiffness, p.t.mass, p.t.derivative) * r.data();
  const BlockVector got = apply_global(p.x.mass, p.x.stiffness, p.t.mass, p.t.derivative, r);
  EXPECT_LT((got.data() - expected).norm(), 1e-13 * expected.norm());
  EXPECT_THROW(apply_global(p.x.mass, p.x.stiffness, p.t.mass, p.t.derivative, BlockVector(16, 5)),
               InvalidArgument);
}

TEST(TransformBlocks, Examples) {
  const BlockVector v(2, 3, random_complex(6, 1));
  EXPECT_EQ(transform_blocks(DenseComplexMatrix::Identity(3, 3), v).data(), v.data());

  const BlockVector w(4, 2, random_complex(8, 2));
  DenseComplexMatrix d = DenseComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  const BlockVector scaled = transform_blocks(d, w);
  EXPECT_LT((scaled.block(0) - 2.0 * w.block(0)).norm(), 1e-15);
  EXPECT_LT((scaled.block(1) - 3.0 * w.block(1)).norm(), 1e-15);

  const DenseComplexMatrix t = random_complex_matrix(3, 5);
  const BlockVector out = transform_blocks(t, v);
  for (Index l = 0; l < 3; ++l) {
    for (Index j = 0; j < 2; ++j) {
      Complex sum = 0.0;
      for (Index k = 0; k < 3; ++k) sum += t(l, k) * v(k, j);
      EXPECT_LT(std::abs(out(l, j) - sum), 1e-14);
    }
  }
  EXPECT_THROW(transform_blocks(random_complex_matrix(2, 1), v), InvalidArgument);
}
