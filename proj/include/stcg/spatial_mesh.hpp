#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stcg/types.hpp"

namespace stcg {

/// Vertex coordinates. For d = 1 only the first component is used.
using Point = std::array<Real, 2>;

/**
 * @brief Conforming mesh of an interval (d = 1) or a polygon (d = 2).
 *
 * Elements are stored as flat vertex-index tuples of length d + 1
 * (counterclockwise for triangles). Boundary vertices are derived from the
 * topology: in 2D the endpoints of edges owned by a single triangle, in 1D
 * the vertices owned by a single interval. Interior vertices are numbered
 * 0..n_x-1 in vertex order; these are the degrees of freedom of the
 * homogeneous Dirichlet space.
 */
class SpatialMesh {
public:
  SpatialMesh(int dimension, std::vector<Point> vertices, std::vector<int> connectivity)
      : dim_(dimension), vertices_(std::move(vertices)), connectivity_(std::move(connectivity)) {
    if (dim_ != 1 && dim_ != 2) {
      throw InvalidArgument("spatial mesh dimension must be 1 or 2");
    }
    const auto nv = static_cast<int>(vertices_.size());
    if (connectivity_.empty() || connectivity_.size() % nodes_per_element() != 0) {
      throw InvalidArgument("connectivity size is not a multiple of the element arity");
    }
    for (int v : connectivity_) {
      if (v < 0 || v >= nv) {
        throw InvalidArgument("element references a vertex out of range");
      }
    }
    for (Index e = 0; e < num_elements(); ++e) {
      if (!(element_measure(e) > 0.0)) {
        throw InvalidArgument("element " + std::to_string(e) +
                              " has non-positive measure (check orientation)");
      }
    }
    compute_boundary();
  }

  int dimension() const noexcept { return dim_; }
  int nodes_per_element() const noexcept { return dim_ + 1; }
  Index num_vertices() const noexcept { return static_cast<Index>(vertices_.size()); }
  Index num_elements() const noexcept {
    return static_cast<Index>(connectivity_.size()) / nodes_per_element();
  }
  /// Number of interior vertices n_x.
  Index num_dofs() const noexcept { return num_dofs_; }

  const Point& vertex(Index v) const { return vertices_[v]; }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  std::span<const int> element(Index e) const {
    return {connectivity_.data() + e * nodes_per_element(),
            static_cast<std::size_t>(nodes_per_element())};
  }
  const std::vector<int>& connectivity() const noexcept { return connectivity_; }

  bool is_boundary(Index v) const { return boundary_[v]; }
  const std::vector<bool>& boundary_flags() const noexcept { return boundary_; }
  /// Interior DOF index of vertex v, or -1 for boundary vertices.
  int dof(Index v) const { return dof_[v]; }

  /// Length (d = 1) or signed area (d = 2) of element e.
  Real element_measure(Index e) const {
    const auto el = element(e);
    const Point& a = vertices_[el[0]];
    const Point& b = vertices_[el[1]];
    if (dim_ == 1) {
      return b[0] - a[0];
    }
    const Point& c = vertices_[el[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
  }

  /// Gradients of the barycentric coordinates on element e (one per vertex).
  std::array<Point, 3> barycentric_gradients(Index e) const {
    const auto el = element(e);
    std::array<Point, 3> g{};
    if (dim_ == 1) {
      const Real h = element_measure(e);
      g[0] = {-1.0 / h, 0.0};
      g[1] = {1.0 / h, 0.0};
      return g;
    }
    const Point& a = vertices_[el[0]];
    const Point& b = vertices_[el[1]];
    const Point& c = vertices_[el[2]];
    const Real twice_area = 2.0 * element_measure(e);
    g[0] = {(b[1] - c[1]) / twice_area, (c[0] - b[0]) / twice_area};
    g[1] = {(c[1] - a[1]) / twice_area, (a[0] - c[0]) / twice_area};
    g[2] = {(a[1] - b[1]) / twice_area, (b[0] - a[0]) / twice_area};
    return g;
  }

  /// Maps reference coordinates (xi, eta) (or xi for d = 1) into element e.
  Point map_to_element(Index e, const Point& ref) const {
    const auto el = element(e);
    const Point& a = vertices_[el[0]];
    const Point& b = vertices_[el[1]];
    if (dim_ == 1) {
      return {a[0] + ref[0] * (b[0] - a[0]), 0.0};
    }
    const Point& c = vertices_[el[2]];
    return {a[0] + ref[0] * (b[0] - a[0]) + ref[1] * (c[0] - a[0]),
            a[1] + ref[0] * (b[1] - a[1]) + ref[1] * (c[1] - a[1])};
  }

  /// Barycentric coordinates of p with respect to element e.
  std::array<Real, 3> barycentric(Index e, const Point& p) const {
    const auto el = element(e);
    const Point& a = vertices_[el[0]];
    if (dim_ == 1) {
      const Real s = (p[0] - a[0]) / element_measure(e);
      return {1.0 - s, s, 0.0};
    }
    const auto g = barycentric_gradients(e);
    const Real dx = p[0] - a[0];
    const Real dy = p[1] - a[1];
    const Real l1 = g[1][0] * dx + g[1][1] * dy;
    const Real l2 = g[2][0] * dx + g[2][1] * dy;
    return {1.0 - l1 - l2, l1, l2};
  }

  /// Element containing p (closed), or -1. Linear scan.
  Index locate(const Point& p, Real tol = 1e-12) const {
    for (Index e = 0; e < num_elements(); ++e) {
      const auto lam = barycentric(e, p);
      if (std::all_of(lam.begin(), lam.begin() + nodes_per_element(),
                      [tol](Real l) { return l >= -tol; })) {
        return e;
      }
    }
    return -1;
  }

  /// Every interior facet is shared by exactly two elements with opposite
  /// orientation; every other facet is on the boundary.
  bool is_admissible() const {
    if (dim_ == 1) {
      std::map<int, int> count;
      for (Index e = 0; e < num_elements(); ++e) {
        for (int v : element(e)) {
          if (++count[v] > 2) {
            return false;
          }
        }
      }
      return true;
    }
    std::map<std::pair<int, int>, int> directed;
    for (Index e = 0; e < num_elements(); ++e) {
      const auto el = element(e);
      for (int k = 0; k < 3; ++k) {
        if (++directed[{el[k], el[(k + 1) % 3]}] > 1) {
          return false;
        }
      }
    }
    return true;
  }

private:
  void compute_boundary() {
    boundary_.assign(vertices_.size(), false);
    if (dim_ == 1) {
      std::vector<int> count(vertices_.size(), 0);
      for (int v : connectivity_) {
        ++count[v];
      }
      for (std::size_t v = 0; v < count.size(); ++v) {
        boundary_[v] = count[v] == 1;
      }
    } else {
      std::map<std::pair<int, int>, int> edges;
      for (Index e = 0; e < num_elements(); ++e) {
        const auto el = element(e);
        for (int k = 0; k < 3; ++k) {
          const int a = el[k];
          const int b = el[(k + 1) % 3];
          ++edges[{std::min(a, b), std::max(a, b)}];
        }
      }
      for (const auto& [edge, count] : edges) {
        if (count == 1) {
          boundary_[edge.first] = true;
          boundary_[edge.second] = true;
        }
      }
    }
    dof_.assign(vertices_.size(), -1);
    int next = 0;
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      if (!boundary_[v]) {
        dof_[v] = next++;
      }
    }
    num_dofs_ = next;
  }

  int dim_;
  std::vector<Point> vertices_;
  std::vector<int> connectivity_;
  std::vector<bool> boundary_;
  std::vector<int> dof_;
  Index num_dofs_ = 0;
};

/// Uniform grid on the unit square with (m+1)^2 vertices numbered row by
/// row; each cell is split along its (0,0)-(1,1) diagonal.
inline SpatialMesh build_structured_square(int m) {
  if (m < 1) {
    throw InvalidArgument("structured square requires m >= 1");
  }
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(m + 1) * (m + 1));
  for (int row = 0; row <= m; ++row) {
    for (int col = 0; col <= m; ++col) {
      vertices.push_back({static_cast<Real>(col) / m, static_cast<Real>(row) / m});
    }
  }
  std::vector<int> conn;
  conn.reserve(static_cast<std::size_t>(6) * m * m);
  const auto id = [m](int row, int col) { return row * (m + 1) + col; };
  for (int row = 0; row < m; ++row) {
    for (int col = 0; col < m; ++col) {
      const int v00 = id(row, col);
      const int v10 = id(row, col + 1);
      const int v01 = id(row + 1, col);
      const int v11 = id(row + 1, col + 1);
      conn.insert(conn.end(), {v00, v10, v11, v00, v11, v01});
    }
  }
  return SpatialMesh(2, std::move(vertices), std::move(conn));
}

inline SpatialMesh build_interval(int m, Real length) {
  if (m < 1 || !(length > 0.0)) {
    throw InvalidArgument("interval mesh requires m >= 1 and L > 0");
  }
  std::vector<Point> vertices;
  for (int i = 0; i <= m; ++i) {
    vertices.push_back({length * i / m, 0.0});
  }
  std::vector<int> conn;
  for (int i = 0; i < m; ++i) {
    conn.insert(conn.end(), {i, i + 1});
  }
  return SpatialMesh(1, std::move(vertices), std::move(conn));
}

/// Red refinement (d = 2) or bisection (d = 1). Parent vertices keep their
/// indices; edge midpoints are appended in order of first visit.
inline SpatialMesh refine_uniform(const SpatialMesh& mesh) {
  std::vector<Point> vertices = mesh.vertices();
  std::map<std::pair<int, int>, int> midpoint_of;
  const auto midpoint = [&](int a, int b) {
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    auto it = midpoint_of.find(key);
    if (it != midpoint_of.end()) {
      return it->second;
    }
    const Point& pa = vertices[a];
    const Point& pb = vertices[b];
    vertices.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
    const int id = static_cast<int>(vertices.size()) - 1;
    midpoint_of.emplace(key, id);
    return id;
  };

  std::vector<int> conn;
  conn.reserve(mesh.connectivity().size() * (mesh.dimension() == 1 ? 2 : 4));
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto el = mesh.element(e);
    if (mesh.dimension() == 1) {
      const int m = midpoint(el[0], el[1]);
      conn.insert(conn.end(), {el[0], m, m, el[1]});
      continue;
    }
    const int a = el[0];
    const int b = el[1];
    const int c = el[2];
    const int ab = midpoint(a, b);
    const int bc = midpoint(b, c);
    const int ca = midpoint(c, a);
    conn.insert(conn.end(), {a, ab, ca, ab, b, bc, ca, bc, c, ab, bc, ca});
  }
  return SpatialMesh(mesh.dimension(), std::move(vertices), std::move(conn));
}

/// h_x: maximal element length (d = 1) or square root of the maximal
/// element area (d = 2).
inline Real mesh_size(const SpatialMesh& mesh) {
  Real largest = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    largest = std::max(largest, mesh.element_measure(e));
  }
  return mesh.dimension() == 1 ? largest : std::sqrt(largest);
}

/// Plain-text export: "d nv ne", vertex lines, element lines (0-based),
/// then one line of 0/1 boundary flags.
inline void write_mesh(std::ostream& out, const SpatialMesh& mesh) {
  const auto old_precision = out.precision(17);
  out << mesh.dimension() << ' ' << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
  for (const Point& p : mesh.vertices()) {
    out << p[0];
    if (mesh.dimension() == 2) {
      out << ' ' << p[1];
    }
    out << '\n';
  }
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto el = mesh.element(e);
    for (std::size_t k = 0; k < el.size(); ++k) {
      out << (k ? " " : "") << el[k];
    }
    out << '\n';
  }
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    out << (v ? " " : "") << (mesh.is_boundary(v) ? 1 : 0);
  }
  out << '\n';
  out.precision(old_precision);
}

/// Reads the format of write_mesh. Boundary flags in the file must agree
/// with the flags recomputed from the topology.
inline SpatialMesh read_mesh(std::istream& in) {
  int dim = 0;
  Index nv = 0;
  Index ne = 0;
  if (!(in >> dim >> nv >> ne) || nv <= 0 || ne <= 0 || (dim != 1 && dim != 2)) {
    throw InvalidArgument("mesh file: malformed header");
  }
  std::vector<Point> vertices(nv, Point{0.0, 0.0});
  for (auto& p : vertices) {
    if (!(in >> p[0]) || (dim == 2 && !(in >> p[1]))) {
      throw InvalidArgument("mesh file: truncated vertex block");
    }
  }
  std::vector<int> conn(static_cast<std::size_t>(ne) * (dim + 1));
  for (int& v : conn) {
    if (!(in >> v)) {
      throw InvalidArgument("mesh file: truncated element block");
    }
  }
  SpatialMesh mesh(dim, std::move(vertices), std::move(conn));
  for (Index v = 0; v < nv; ++v) {
    int flag = 0;
    if (!(in >> flag)) {
      throw InvalidArgument("mesh file: truncated boundary flags");
    }
    if ((flag != 0) != mesh.is_boundary(v)) {
      throw InvalidArgument("mesh file: boundary flag of vertex " + std::to_string(v) +
                            " disagrees with the topology");
    }
  }
  return mesh;
}

} // namespace stcg
