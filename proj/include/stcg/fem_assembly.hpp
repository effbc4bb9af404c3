#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "stcg/quadrature.hpp"
#include "stcg/spatial_mesh.hpp"
#include "stcg/temporal_mesh.hpp"
#include "stcg/types.hpp"

namespace stcg {

/**
 * @brief Complex space-time coefficient vector of length n_x * n_t.
 *
 * The entry for temporal DOF l (0-based, node t_{l+1}) and spatial DOF j is
 * stored at l * n_x + j, so every temporal block is contiguous. Viewed as a
 * column-major n_x x n_t matrix, block l is column l.
 */
class BlockVector {
public:
  BlockVector() = default;
  BlockVector(Index spatial_dofs, Index temporal_dofs)
      : nx_(spatial_dofs), nt_(temporal_dofs), data_(ComplexVector::Zero(nx_ * nt_)) {}
  BlockVector(Index spatial_dofs, Index temporal_dofs, ComplexVector data)
      : nx_(spatial_dofs), nt_(temporal_dofs), data_(std::move(data)) {
    if (data_.size() != nx_ * nt_) {
      throw InvalidArgument("block vector length does not match n_x * n_t");
    }
  }

  Index spatial_dofs() const noexcept { return nx_; }
  Index temporal_dofs() const noexcept { return nt_; }
  Index size() const noexcept { return data_.size(); }

  auto block(Index l) { return data_.segment(l * nx_, nx_); }
  auto block(Index l) const { return data_.segment(l * nx_, nx_); }

  Eigen::Map<Eigen::MatrixXcd> as_matrix() { return {data_.data(), nx_, nt_}; }
  Eigen::Map<const Eigen::MatrixXcd> as_matrix() const { return {data_.data(), nx_, nt_}; }

  ComplexVector& data() noexcept { return data_; }
  const ComplexVector& data() const noexcept { return data_; }

  Complex& operator()(Index l, Index j) { return data_[l * nx_ + j]; }
  Complex operator()(Index l, Index j) const { return data_[l * nx_ + j]; }

private:
  Index nx_ = 0;
  Index nt_ = 0;
  ComplexVector data_;
};

struct SpatialMatrices {
  SparseRealMatrix mass;      ///< M_x
  SparseRealMatrix stiffness; ///< A_x
};

struct TemporalMatrices {
  SparseRealMatrix mass;       ///< M_t
  SparseRealMatrix derivative; ///< B_t, row = test, column = trial
};

/// P1 mass and stiffness matrices on the interior DOFs, from closed-form
/// element matrices.
inline SpatialMatrices assemble_spatial(const SpatialMesh& mesh) {
  const Index nx = mesh.num_dofs();
  if (nx == 0) {
    throw InvalidArgument("assemble_spatial: mesh has no interior degrees of freedom");
  }
  const int nodes = mesh.nodes_per_element();
  std::vector<Eigen::Triplet<Real>> mass;
  std::vector<Eigen::Triplet<Real>> stiff;
  mass.reserve(static_cast<std::size_t>(mesh.num_elements()) * nodes * nodes);
  stiff.reserve(mass.capacity());

  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto el = mesh.element(e);
    const Real measure = mesh.element_measure(e);
    const auto grad = mesh.barycentric_gradients(e);
    // Mass: |e| (1 + delta_ab) / ((d + 1)(d + 2)).
    const Real mass_scale = measure / ((nodes) * (nodes + 1));
    for (int a = 0; a < nodes; ++a) {
      const int row = mesh.dof(el[a]);
      if (row < 0) {
        continue;
      }
      for (int b = 0; b < nodes; ++b) {
        const int col = mesh.dof(el[b]);
        if (col < 0) {
          continue;
        }
        mass.emplace_back(row, col, mass_scale * (a == b ? 2.0 : 1.0));
        stiff.emplace_back(row, col,
                           measure * (grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1]));
      }
    }
  }
  SpatialMatrices out;
  out.mass.resize(nx, nx);
  out.stiffness.resize(nx, nx);
  out.mass.setFromTriplets(mass.begin(), mass.end());
  out.stiffness.setFromTriplets(stiff.begin(), stiff.end());
  return out;
}

/// Tridiagonal temporal matrices for hat functions at t_1..t_N.
inline TemporalMatrices assemble_temporal(const TemporalMesh& mesh) {
  const Index nt = mesh.num_dofs();
  std::vector<Eigen::Triplet<Real>> mass;
  std::vector<Eigen::Triplet<Real>> deriv;
  for (Index k = 0; k < nt; ++k) {
    // DOF k lives at node k + 1; its support is [t_k, t_{k+2}] (clipped at T).
    const Real left = mesh.step(k + 1);
    const Real right = k + 1 < nt ? mesh.step(k + 2) : 0.0;
    mass.emplace_back(k, k, (left + right) / 3.0);
    if (k + 1 < nt) {
      mass.emplace_back(k, k + 1, right / 6.0);
      mass.emplace_back(k + 1, k, right / 6.0);
      deriv.emplace_back(k, k + 1, 0.5);
      deriv.emplace_back(k + 1, k, -0.5);
    }
  }
  deriv.emplace_back(nt - 1, nt - 1, 0.5);
  TemporalMatrices out;
  out.mass.resize(nt, nt);
  out.derivative.resize(nt, nt);
  out.mass.setFromTriplets(mass.begin(), mass.end());
  out.derivative.setFromTriplets(deriv.begin(), deriv.end());
  return out;
}

/// Quadrature used for load vectors and error norms: the 7-point degree-5
/// triangle rule in 2D, 5-point Gauss in 1D and in time.
inline QuadratureRule default_spatial_rule(const SpatialMesh& mesh) {
  return mesh.dimension() == 2 ? triangle_rule(5) : gauss_legendre(5);
}
inline QuadratureRule default_temporal_rule() { return gauss_legendre(5); }

namespace detail {

/// Physical quadrature points of every element, with weights already
/// scaled by the element measure. Basis values are element independent.
struct ElementQuadrature {
  Index points_per_element = 0;
  std::vector<Point> points;
  std::vector<Real> weights;
  std::vector<std::array<Real, 3>> basis; ///< barycentric values per ref point

  ElementQuadrature(const SpatialMesh& mesh, const QuadratureRule& rule)
      : points_per_element(static_cast<Index>(rule.size())) {
    const Real ref_measure = mesh.dimension() == 2 ? 2.0 : 1.0;
    points.reserve(static_cast<std::size_t>(mesh.num_elements()) * rule.size());
    weights.reserve(points.capacity());
    for (Index e = 0; e < mesh.num_elements(); ++e) {
      const Real measure = mesh.element_measure(e);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        points.push_back(mesh.map_to_element(e, rule.points[q]));
        weights.push_back(rule.weights[q] * measure * ref_measure);
      }
    }
    for (const Point& p : rule.points) {
      if (mesh.dimension() == 2) {
        basis.push_back({1.0 - p[0] - p[1], p[0], p[1]});
      } else {
        basis.push_back({1.0 - p[0], p[0], 0.0});
      }
    }
  }
};

} // namespace detail

/// Nodal values of psi0 at the interior vertices. Throws if psi0 does not
/// vanish (|psi0| <= tol) at every boundary vertex.
template <class Initial>
ComplexVector interpolate_initial(const SpatialMesh& mesh, Initial&& psi0, Real tol = 1e-12) {
  ComplexVector values(mesh.num_dofs());
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    const Complex value = psi0(mesh.vertex(v));
    if (mesh.is_boundary(v)) {
      if (std::abs(value) > tol) {
        throw InvalidArgument("initial datum does not vanish at boundary vertex " +
                              std::to_string(v));
      }
    } else {
      values[mesh.dof(v)] = value;
    }
  }
  return values;
}

/// Integrals of the temporal hat functions, int_0^T phi_l dt.
inline Eigen::VectorXd temporal_hat_integrals(const TemporalMesh& mesh) {
  const Index nt = mesh.num_dofs();
  Eigen::VectorXd out(nt);
  for (Index k = 0; k < nt; ++k) {
    out[k] = 0.5 * (mesh.step(k + 1) + (k + 1 < nt ? mesh.step(k + 2) : 0.0));
  }
  return out;
}

/**
 * @brief Right-hand side <f, phi_j phi_l> - a(psi0, phi_j phi_l).
 *
 * The source is integrated with the tensor rule (spatial rule x temporal
 * Gauss rule per interval). The lifting uses the nodal interpolant of psi0,
 * so its contribution is -(int phi_l dt) * (A_x psi0)_j; the time-derivative
 * part of the form vanishes because psi0 does not depend on t.
 *
 * @param source callable (const Point&, Real t) -> Complex
 * @param initial callable (const Point&) -> Complex, zero on the boundary
 */
template <class Source, class Initial>
BlockVector assemble_rhs(const SpatialMesh& mesh_x, const TemporalMesh& mesh_t, Source&& source,
                         Initial&& initial, const SparseRealMatrix& stiffness) {
  const Index nx = mesh_x.num_dofs();
  const Index nt = mesh_t.num_dofs();
  if (stiffness.rows() != nx || stiffness.cols() != nx) {
    throw InvalidArgument("assemble_rhs: stiffness matrix does not match the spatial mesh");
  }
  BlockVector rhs(nx, nt);

  const detail::ElementQuadrature quad(mesh_x, default_spatial_rule(mesh_x));
  const QuadratureRule time_rule = default_temporal_rule();
  const int nodes = mesh_x.nodes_per_element();
  const Index npe = quad.points_per_element;

  ComplexVector load(nx);
  for (Index interval = 1; interval <= mesh_t.num_intervals(); ++interval) {
    const Real t0 = mesh_t.breakpoint(interval - 1);
    const Real h = mesh_t.step(interval);
    for (std::size_t q = 0; q < time_rule.size(); ++q) {
      const Real tau = time_rule.points[q][0];
      const Real t = t0 + tau * h;
      load.setZero();
      for (Index e = 0; e < mesh_x.num_elements(); ++e) {
        const auto el = mesh_x.element(e);
        for (Index p = 0; p < npe; ++p) {
          const Index idx = e * npe + p;
          const Complex value = source(quad.points[idx], t) * quad.weights[idx];
          for (int a = 0; a < nodes; ++a) {
            const int j = mesh_x.dof(el[a]);
            if (j >= 0) {
              load[j] += value * quad.basis[p][a];
            }
          }
        }
      }
      const Real wt = time_rule.weights[q] * h;
      // Hat at the right node t_interval has DOF interval - 1; the left one
      // has DOF interval - 2 unless it is the initial node.
      rhs.block(interval - 1) += (wt * tau) * load;
      if (interval >= 2) {
        rhs.block(interval - 2) += (wt * (1.0 - tau)) * load;
      }
    }
  }

  const ComplexVector nodal = interpolate_initial(mesh_x, initial);
  if (nodal.squaredNorm() > 0.0) {
    const ComplexVector lifting = stiffness.cast<Complex>() * nodal;
    const Eigen::VectorXd hat_integrals = temporal_hat_integrals(mesh_t);
    for (Index l = 0; l < nt; ++l) {
      rhs.block(l) -= hat_integrals[l] * lifting;
    }
  }
  return rhs;
}

} // namespace stcg
