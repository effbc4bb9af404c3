#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stcg/temporal_mesh.hpp"

using namespace stcg;

TEST(UniformTemporalMesh, StepSizes) {
  EXPECT_DOUBLE_EQ(uniform_temporal_mesh(5.0, 64).max_step(), 7.8125e-02);
  EXPECT_DOUBLE_EQ(uniform_temporal_mesh(5.0, 128).max_step(), 3.90625e-02);
  const TemporalMesh one = uniform_temporal_mesh(1.0, 1);
  EXPECT_EQ(one.breakpoints(), (std::vector<Real>{0.0, 1.0}));
  EXPECT_EQ(one.num_dofs(), 1);
}

TEST(UniformTemporalMesh, RejectsBadArguments) {
  EXPECT_THROW(uniform_temporal_mesh(0.0, 4), InvalidArgument);
  EXPECT_THROW(uniform_temporal_mesh(1.0, 0), InvalidArgument);
}

TEST(GradedTemporalMesh, MaximalGapAndRatio) {
  const TemporalMesh mesh = graded_temporal_mesh(5.0, 64, 1.5);
  const Real expected = 5.0 * (1.0 - std::pow(63.0 / 64.0, 1.5));
  EXPECT_NEAR(mesh.max_step(), expected, 1e-14);
  EXPECT_NEAR(mesh.max_step(), 1.167e-01, 1e-4);
  EXPECT_NEAR(mesh.min_step(), 5.0 / 512.0, 1e-15);
  EXPECT_NEAR(mesh.max_step() / mesh.min_step(), 11.95, 0.01);
  EXPECT_NEAR(mesh.terminal_time(), 5.0, 0.0);
}

TEST(GradedTemporalMesh, ExponentOneIsUniform) {
  EXPECT_EQ(graded_temporal_mesh(3.0, 10, 1.0).breakpoints(),
            uniform_temporal_mesh(3.0, 10).breakpoints());
  EXPECT_THROW(graded_temporal_mesh(1.0, 4, 0.5), InvalidArgument);
}

TEST(GradedTemporalMesh, StrictlyIncreasing) {
  for (Real q : {1.0, 1.25, 1.5, 2.0, 3.0}) {
    for (Index n : {1, 7, 64, 300}) {
      const TemporalMesh mesh = graded_temporal_mesh(2.0, n, q);
      const auto& t = mesh.breakpoints();
      for (std::size_t l = 1; l < t.size(); ++l) {
        EXPECT_LT(t[l - 1], t[l]);
      }
    }
  }
}

TEST(RefineBisect, UniformMeshRefinesToFinerUniformMesh) {
  EXPECT_EQ(refine_bisect(uniform_temporal_mesh(5.0, 64)).breakpoints(),
            uniform_temporal_mesh(5.0, 128).breakpoints());
  EXPECT_EQ(refine_bisect(uniform_temporal_mesh(1.0, 1)).breakpoints(),
            (std::vector<Real>{0.0, 0.5, 1.0}));
}

TEST(RefineBisect, GradedMeshKeepsOriginalBreakpoints) {
  const TemporalMesh coarse = graded_temporal_mesh(5.0, 64, 1.5);
  const TemporalMesh fine = refine_bisect(coarse);
  ASSERT_EQ(fine.num_intervals(), 128);
  for (Index l = 0; l <= 64; ++l) {
    EXPECT_EQ(fine.breakpoint(2 * l), coarse.breakpoint(l));
  }
  // Bisection differs from regrading at 2N when q > 1.
  EXPECT_NE(fine.breakpoints(), graded_temporal_mesh(5.0, 128, 1.5).breakpoints());
}

TEST(RefineBisect, HalvesMaximalGapOfRandomMeshes) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<Real> step(0.01, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Real> t{0.0};
    const int n = 1 + trial;
    for (int l = 0; l < n; ++l) {
      t.push_back(t.back() + step(gen));
    }
    const TemporalMesh mesh(t);
    EXPECT_NEAR(refine_bisect(mesh).max_step(), 0.5 * mesh.max_step(), 1e-15 * t.back());
  }
}

TEST(TemporalMesh, RejectsInvalidBreakpoints) {
  EXPECT_THROW(TemporalMesh({0.0}), InvalidArgument);
  EXPECT_THROW(TemporalMesh({0.1, 1.0}), InvalidArgument);
  EXPECT_THROW(TemporalMesh({0.0, 0.5, 0.5, 1.0}), InvalidArgument);
}

TEST(TemporalMesh, Locate) {
  const TemporalMesh mesh = uniform_temporal_mesh(1.0, 4);
  EXPECT_EQ(mesh.locate(0.0), 1);
  EXPECT_EQ(mesh.locate(0.3), 2);
  EXPECT_EQ(mesh.locate(1.0), 4);
  EXPECT_EQ(mesh.locate(1.1), 0);
  EXPECT_EQ(mesh.locate(-0.1), 0);
}
