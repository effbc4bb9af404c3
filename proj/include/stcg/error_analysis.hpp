#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "stcg/fem_assembly.hpp"
#include "stcg/parallel.hpp"
#include "stcg/spatial_mesh.hpp"
#include "stcg/temporal_mesh.hpp"
#include "stcg/types.hpp"

namespace stcg {

/// Pointwise data of a closed-form solution.
struct SolutionSample {
  Complex value;
  Complex time_derivative;
  std::array<Complex, 2> gradient;
  Complex laplacian;
};

/**
 * @brief Closed-form solution psi with its derivatives and the matching
 * source f = i d_t psi - Lap psi. The initial datum is psi(., 0).
 */
struct ExactSolution {
  std::function<SolutionSample(const Point&, Real)> sample;
  std::function<Complex(const Point&, Real)> source;

  Complex value(const Point& x, Real t) const { return sample(x, t).value; }
  Complex initial(const Point& x) const { return sample(x, 0.0).value; }
};

/// psi = e^{it} sin(pi x1) sin(pi x2) sin(t x1 x2) on the unit square,
/// with psi(., 0) = 0.
inline ExactSolution manufactured_solution_square() {
  constexpr Real pi = std::numbers::pi;
  ExactSolution s;
  s.sample = [](const Point& p, Real t) {
    const Real x = p[0];
    const Real y = p[1];
    const Complex phase = std::polar(1.0, t);
    const Real s1 = std::sin(pi * x);
    const Real s2 = std::sin(pi * y);
    const Real c1 = std::cos(pi * x);
    const Real c2 = std::cos(pi * y);
    const Real g = std::sin(t * x * y);
    const Real c = std::cos(t * x * y);
    SolutionSample out;
    out.value = phase * (s1 * s2 * g);
    out.time_derivative = kI * out.value + phase * (s1 * s2 * x * y * c);
    out.gradient = {phase * (s2 * (pi * c1 * g + s1 * t * y * c)),
                    phase * (s1 * (pi * c2 * g + s2 * t * x * c))};
    const Real dxx = s2 * (-pi * pi * s1 * g + 2.0 * pi * c1 * t * y * c - s1 * t * t * y * y * g);
    const Real dyy = s1 * (-pi * pi * s2 * g + 2.0 * pi * c2 * t * x * c - s2 * t * t * x * x * g);
    out.laplacian = phase * (dxx + dyy);
    return out;
  };
  s.source = [](const Point& p, Real t) {
    const Real x = p[0];
    const Real y = p[1];
    const Real s1 = std::sin(pi * x);
    const Real s2 = std::sin(pi * y);
    const Real g = std::sin(t * x * y);
    const Real c = std::cos(t * x * y);
    const Real real_part = s1 * s2 * g * (2.0 * pi * pi + t * t * (x * x + y * y) - 1.0) -
                           2.0 * pi * t * c * (y * std::cos(pi * x) * s2 + x * s1 * std::cos(pi * y));
    return std::polar(1.0, t) * Complex(real_part, x * y * s1 * s2 * c);
  };
  return s;
}

/// psi = e^{it} sin(pi x / L) sin(t x) on (0, L), with psi(., 0) = 0.
inline ExactSolution manufactured_solution_interval(Real length) {
  const Real k = std::numbers::pi / length;
  ExactSolution s;
  s.sample = [k](const Point& p, Real t) {
    const Real x = p[0];
    const Complex phase = std::polar(1.0, t);
    const Real sk = std::sin(k * x);
    const Real ck = std::cos(k * x);
    const Real g = std::sin(t * x);
    const Real c = std::cos(t * x);
    SolutionSample out;
    out.value = phase * (sk * g);
    out.time_derivative = kI * out.value + phase * (sk * x * c);
    out.gradient = {phase * (k * ck * g + sk * t * c), Complex{0.0}};
    out.laplacian = phase * (-k * k * sk * g + 2.0 * k * ck * t * c - sk * t * t * g);
    return out;
  };
  s.source = [k](const Point& p, Real t) {
    const Real x = p[0];
    const Real sk = std::sin(k * x);
    const Real g = std::sin(t * x);
    const Real c = std::cos(t * x);
    const Real real_part = sk * g * (k * k + t * t - 1.0) - 2.0 * k * t * std::cos(k * x) * c;
    return std::polar(1.0, t) * Complex(real_part, x * sk * c);
  };
  return s;
}

/// Source-free solution from the lowest Dirichlet mode: psi0 = prod sin(pi x_i / L),
/// psi = e^{i omega t} psi0 with omega = d (pi / L)^2.
inline ExactSolution sine_mode_solution(int dimension, Real length = 1.0) {
  const Real k = std::numbers::pi / length;
  const Real omega = dimension * k * k;
  ExactSolution s;
  s.sample = [k, omega, dimension](const Point& p, Real t) {
    const Complex phase = std::polar(1.0, omega * t);
    const Real sx = std::sin(k * p[0]);
    const Real cx = std::cos(k * p[0]);
    const Real sy = dimension == 2 ? std::sin(k * p[1]) : 1.0;
    const Real cy = dimension == 2 ? std::cos(k * p[1]) : 0.0;
    SolutionSample out;
    out.value = phase * (sx * sy);
    out.time_derivative = kI * omega * out.value;
    out.gradient = {phase * (k * cx * sy), phase * (k * sx * cy)};
    out.laplacian = -omega * out.value;
    return out;
  };
  s.source = [](const Point&, Real) { return Complex{0.0}; };
  return s;
}

inline ExactSolution zero_solution() {
  ExactSolution s;
  s.sample = [](const Point&, Real) { return SolutionSample{}; };
  s.source = [](const Point&, Real) { return Complex{0.0}; };
  return s;
}

/// psi_h(x, t) = sum_{j,l} c_{jl} phi_j(x) phi_l(t) + psi0(x).
template <class Initial>
Complex evaluate_fe(const BlockVector& coeffs, Initial&& psi0, const SpatialMesh& mesh_x,
                    const TemporalMesh& mesh_t, const Point& x, Real t) {
  const Index e = mesh_x.locate(x);
  const Index interval = mesh_t.locate(t);
  if (e < 0 || interval == 0) {
    throw InvalidArgument("evaluate_fe: point lies outside the space-time cylinder");
  }
  const Complex base = psi0(x);
  const Real h = mesh_t.step(interval);
  const Real tau = (t - mesh_t.breakpoint(interval - 1)) / h;
  const auto lam = mesh_x.barycentric(e, x);
  const auto el = mesh_x.element(e);
  Complex sum = 0.0;
  for (int a = 0; a < mesh_x.nodes_per_element(); ++a) {
    const int j = mesh_x.dof(el[a]);
    if (j < 0) {
      continue;
    }
    Complex nodal = tau * coeffs(interval - 1, j);
    if (interval >= 2) {
      nodal += (1.0 - tau) * coeffs(interval - 2, j);
    }
    sum += lam[a] * nodal;
  }
  return base + sum;
}

struct ErrorPair {
  Real l2 = 0.0; ///< ||psi - psi_h||_{L2(Q)}
  Real h1 = 0.0; ///< (||d_t(psi - psi_h)||^2 + ||grad_x(psi - psi_h)||^2)^{1/2}
};

/**
 * @brief Space-time errors of psi_h = sum c phi_j phi_l + psi(., 0).
 *
 * Tensor quadrature on every prism (spatial rule x 5-point Gauss). Partial
 * sums are formed per temporal interval and added in interval order, so the
 * result does not depend on the thread count.
 */
inline ErrorPair spacetime_errors(const BlockVector& coeffs, const ExactSolution& exact,
                                  const SpatialMesh& mesh_x, const TemporalMesh& mesh_t,
                                  int threads = 1) {
  const Index nx = mesh_x.num_dofs();
  if (coeffs.spatial_dofs() != nx || coeffs.temporal_dofs() != mesh_t.num_dofs()) {
    throw InvalidArgument("spacetime_errors: coefficient layout does not match the meshes");
  }
  const detail::ElementQuadrature quad(mesh_x, default_spatial_rule(mesh_x));
  const QuadratureRule time_rule = default_temporal_rule();
  const int nodes = mesh_x.nodes_per_element();
  const Index npe = quad.points_per_element;
  const Index nelem = mesh_x.num_elements();

  // Initial datum and its gradient at the spatial quadrature points.
  std::vector<SolutionSample> initial(quad.points.size());
  for (std::size_t i = 0; i < quad.points.size(); ++i) {
    initial[i] = exact.sample(quad.points[i], 0.0);
  }
  std::vector<std::array<Point, 3>> grads(nelem);
  for (Index e = 0; e < nelem; ++e) {
    grads[e] = mesh_x.barycentric_gradients(e);
  }

  const Index intervals = mesh_t.num_intervals();
  std::vector<std::array<Real, 2>> partial(intervals, {0.0, 0.0});
  parallel_for(intervals, threads, [&](Index k) {
    const Index interval = k + 1;
    const Real t0 = mesh_t.breakpoint(interval - 1);
    const Real h = mesh_t.step(interval);
    const ComplexVector right = coeffs.block(interval - 1);
    const ComplexVector left = interval >= 2 ? ComplexVector(coeffs.block(interval - 2))
                                             : ComplexVector(ComplexVector::Zero(nx));
    const ComplexVector slope = (right - left) / h;
    Real l2 = 0.0;
    Real h1 = 0.0;
    for (std::size_t q = 0; q < time_rule.size(); ++q) {
      const Real tau = time_rule.points[q][0];
      const Real t = t0 + tau * h;
      const Real wt = time_rule.weights[q] * h;
      const ComplexVector current = (1.0 - tau) * left + tau * right;
      Real l2_q = 0.0;
      Real h1_q = 0.0;
      for (Index e = 0; e < nelem; ++e) {
        const auto el = mesh_x.element(e);
        std::array<Complex, 3> c{};
        std::array<Complex, 3> dc{};
        for (int a = 0; a < nodes; ++a) {
          const int j = mesh_x.dof(el[a]);
          if (j >= 0) {
            c[a] = current[j];
            dc[a] = slope[j];
          }
        }
        std::array<Complex, 2> grad_h{};
        for (int a = 0; a < nodes; ++a) {
          grad_h[0] += c[a] * grads[e][a][0];
          grad_h[1] += c[a] * grads[e][a][1];
        }
        for (Index p = 0; p < npe; ++p) {
          const Index idx = e * npe + p;
          const SolutionSample ex = exact.sample(quad.points[idx], t);
          const auto& b = quad.basis[p];
          Complex val_h = initial[idx].value;
          Complex dt_h = 0.0;
          for (int a = 0; a < nodes; ++a) {
            val_h += b[a] * c[a];
            dt_h += b[a] * dc[a];
          }
          const Complex gx = ex.gradient[0] - initial[idx].gradient[0] - grad_h[0];
          const Complex gy = ex.gradient[1] - initial[idx].gradient[1] - grad_h[1];
          const Real w = quad.weights[idx];
          l2_q += w * std::norm(ex.value - val_h);
          h1_q += w * (std::norm(ex.time_derivative - dt_h) + std::norm(gx) + std::norm(gy));
        }
      }
      l2 += wt * l2_q;
      h1 += wt * h1_q;
    }
    partial[k] = {l2, h1};
  });

  Real l2 = 0.0;
  Real h1 = 0.0;
  for (const auto& p : partial) {
    l2 += p[0];
    h1 += p[1];
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

/// eoc_J = log2(e_{J-1} / e_J) for consecutive mesh halvings.
inline std::vector<Real> eoc(const std::vector<Real>& errors) {
  if (errors.size() < 2) {
    throw InvalidArgument("eoc: need at least two error values");
  }
  for (Real e : errors) {
    if (!(e > 0.0)) {
      throw InvalidArgument("eoc: error values must be positive");
    }
  }
  std::vector<Real> out;
  for (std::size_t j = 1; j < errors.size(); ++j) {
    out.push_back(std::log(errors[j - 1] / errors[j]) / std::log(2.0));
  }
  return out;
}

} // namespace stcg
