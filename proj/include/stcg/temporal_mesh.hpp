#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "stcg/types.hpp"

namespace stcg {

/// Breakpoints 0 = t_0 < ... < t_N = T. The DOFs sit at t_1..t_N, so n_t = N.
class TemporalMesh {
public:
  explicit TemporalMesh(std::vector<Real> breakpoints) : t_(std::move(breakpoints)) {
    if (t_.size() < 2 || t_.front() != 0.0) {
      throw InvalidArgument("temporal mesh needs t_0 = 0 and at least one interval");
    }
    for (std::size_t l = 1; l < t_.size(); ++l) {
      if (!(t_[l] > t_[l - 1])) {
        throw InvalidArgument("temporal breakpoints must be strictly increasing");
      }
    }
  }

  Index num_intervals() const noexcept { return static_cast<Index>(t_.size()) - 1; }
  Index num_dofs() const noexcept { return num_intervals(); }
  Real terminal_time() const noexcept { return t_.back(); }
  Real breakpoint(Index l) const { return t_[l]; }
  const std::vector<Real>& breakpoints() const noexcept { return t_; }
  Real step(Index l) const { return t_[l] - t_[l - 1]; }

  Real max_step() const {
    Real h = 0.0;
    for (Index l = 1; l <= num_intervals(); ++l) {
      h = std::max(h, step(l));
    }
    return h;
  }

  Real min_step() const {
    Real h = step(1);
    for (Index l = 2; l <= num_intervals(); ++l) {
      h = std::min(h, step(l));
    }
    return h;
  }

  /// Interval index l (1-based) with t in [t_{l-1}, t_l], or 0 if outside.
  Index locate(Real t) const {
    if (t < t_.front() || t > t_.back()) {
      return 0;
    }
    const auto it = std::upper_bound(t_.begin() + 1, t_.end() - 1, t);
    return static_cast<Index>(it - t_.begin());
  }

private:
  std::vector<Real> t_;
};

inline TemporalMesh uniform_temporal_mesh(Real terminal_time, Index intervals) {
  if (!(terminal_time > 0.0) || intervals < 1) {
    throw InvalidArgument("uniform temporal mesh requires T > 0 and N >= 1");
  }
  std::vector<Real> t(intervals + 1);
  for (Index l = 0; l <= intervals; ++l) {
    t[l] = terminal_time * static_cast<Real>(l) / static_cast<Real>(intervals);
  }
  t.back() = terminal_time;
  return TemporalMesh(std::move(t));
}

/// t_l = T (l/N)^q, clustering towards t = 0 for q > 1.
inline TemporalMesh graded_temporal_mesh(Real terminal_time, Index intervals, Real exponent) {
  if (!(terminal_time > 0.0) || intervals < 1 || !(exponent >= 1.0)) {
    throw InvalidArgument("graded temporal mesh requires T > 0, N >= 1 and q >= 1");
  }
  if (exponent == 1.0) {
    return uniform_temporal_mesh(terminal_time, intervals);
  }
  std::vector<Real> t(intervals + 1);
  for (Index l = 0; l <= intervals; ++l) {
    t[l] = terminal_time *
           std::pow(static_cast<Real>(l) / static_cast<Real>(intervals), exponent);
  }
  t.back() = terminal_time;
  return TemporalMesh(std::move(t));
}

/// Inserts the midpoint of every interval.
inline TemporalMesh refine_bisect(const TemporalMesh& mesh) {
  const auto& t = mesh.breakpoints();
  std::vector<Real> refined;
  refined.reserve(2 * t.size() - 1);
  refined.push_back(t.front());
  for (std::size_t l = 1; l < t.size(); ++l) {
    refined.push_back(0.5 * (t[l - 1] + t[l]));
    refined.push_back(t[l]);
  }
  return TemporalMesh(std::move(refined));
}

} // namespace stcg
