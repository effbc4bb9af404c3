#pragma once

// Space-time continuous Galerkin discretization of the linear Schroedinger
// equation with Kronecker-structured direct solvers.

#include "stcg/dense_linalg.hpp"
#include "stcg/error_analysis.hpp"
#include "stcg/fem_assembly.hpp"
#include "stcg/harness.hpp"
#include "stcg/kronecker_solver.hpp"
#include "stcg/parallel.hpp"
#include "stcg/quadrature.hpp"
#include "stcg/spatial_mesh.hpp"
#include "stcg/spatial_solver.hpp"
#include "stcg/temporal_mesh.hpp"
#include "stcg/types.hpp"
