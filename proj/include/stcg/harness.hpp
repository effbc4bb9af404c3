#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stcg/error_analysis.hpp"
#include "stcg/fem_assembly.hpp"
#include "stcg/kronecker_solver.hpp"
#include "stcg/spatial_mesh.hpp"
#include "stcg/temporal_mesh.hpp"

namespace stcg {

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

enum class SpatialKind { Square, Interval };
enum class TemporalKind { Uniform, Graded };
enum class ProblemKind { Manufactured, SineMode, Zero };
enum class OutputFormat { Table, Csv };

struct RunConfig {
  SpatialKind spatial = SpatialKind::Square;
  int spatial_cells = 32;    ///< m
  Real interval_length = 1.0; ///< L, interval preset only
  TemporalKind temporal = TemporalKind::Uniform;
  Real grading = 1.0; ///< q, graded preset only
  Real terminal_time = 5.0;
  Index base_intervals = 64; ///< N_t at level 0
  int levels = 0;            ///< J_max
  SolverVariant solver = SolverVariant::BartelsStewart;
  int threads = 1;
  ProblemKind problem = ProblemKind::Manufactured;
  OutputFormat format = OutputFormat::Table;
  std::string out;
  double memory_limit_bytes = 8.0 * 1024 * 1024 * 1024;
  bool assembly_column = false;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::string format_real(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Real parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  Real v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  if (used != text.size()) {
    throw ConfigError(key + ": trailing characters in '" + text + "'");
  }
  return v;
}

inline long long parse_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

} // namespace detail

/// Applies one key=value setting. Keys: spatial, temporal, T, nt, levels,
/// solver, threads, problem, format, out, memory_limit, assembly_column.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "spatial") {
    if (value.rfind("square:", 0) == 0) {
      c.spatial = SpatialKind::Square;
      c.spatial_cells = static_cast<int>(detail::parse_int(key, value.substr(7)));
    } else if (value.rfind("interval:", 0) == 0) {
      const std::string rest = value.substr(9);
      const auto comma = rest.find(',');
      if (comma == std::string::npos) {
        throw ConfigError("spatial: interval preset needs 'interval:<m>,<L>'");
      }
      c.spatial = SpatialKind::Interval;
      c.spatial_cells = static_cast<int>(detail::parse_int(key, rest.substr(0, comma)));
      c.interval_length = detail::parse_real(key, rest.substr(comma + 1));
    } else {
      throw ConfigError("spatial: unknown preset '" + value + "'");
    }
  } else if (key == "temporal") {
    if (value == "uniform") {
      c.temporal = TemporalKind::Uniform;
      c.grading = 1.0;
    } else if (value.rfind("graded:", 0) == 0) {
      c.temporal = TemporalKind::Graded;
      c.grading = detail::parse_real(key, value.substr(7));
    } else {
      throw ConfigError("temporal: unknown preset '" + value + "'");
    }
  } else if (key == "T") {
    c.terminal_time = detail::parse_real(key, value);
  } else if (key == "nt") {
    c.base_intervals = detail::parse_int(key, value);
  } else if (key == "levels") {
    c.levels = static_cast<int>(detail::parse_int(key, value));
  } else if (key == "solver") {
    if (value == "bs") {
      c.solver = SolverVariant::BartelsStewart;
    } else if (value == "fd") {
      c.solver = SolverVariant::FastDiagonalization;
    } else {
      throw ConfigError("solver: expected 'bs' or 'fd', got '" + value + "'");
    }
  } else if (key == "threads") {
    c.threads = static_cast<int>(detail::parse_int(key, value));
  } else if (key == "problem") {
    if (value == "manufactured") {
      c.problem = ProblemKind::Manufactured;
    } else if (value == "sine") {
      c.problem = ProblemKind::SineMode;
    } else if (value == "zero") {
      c.problem = ProblemKind::Zero;
    } else {
      throw ConfigError("problem: expected manufactured|sine|zero, got '" + value + "'");
    }
  } else if (key == "format") {
    if (value == "table") {
      c.format = OutputFormat::Table;
    } else if (value == "csv") {
      c.format = OutputFormat::Csv;
    } else {
      throw ConfigError("format: expected 'table' or 'csv', got '" + value + "'");
    }
  } else if (key == "out") {
    c.out = value;
  } else if (key == "memory_limit") {
    c.memory_limit_bytes = detail::parse_real(key, value);
  } else if (key == "assembly_column") {
    c.assembly_column = value == "1" || value == "true";
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

inline void validate(const RunConfig& c) {
  if (c.spatial_cells < 1) {
    throw ConfigError("spatial: m must be at least 1");
  }
  if (c.spatial == SpatialKind::Square && c.spatial_cells < 2) {
    throw ConfigError("spatial: square preset needs m >= 2 to have interior vertices");
  }
  if (c.spatial == SpatialKind::Interval && c.spatial_cells < 2) {
    throw ConfigError("spatial: interval preset needs m >= 2 to have interior vertices");
  }
  if (!(c.interval_length > 0.0)) {
    throw ConfigError("spatial: interval length must be positive");
  }
  if (!(c.grading >= 1.0)) {
    throw ConfigError("temporal: grading exponent must be >= 1");
  }
  if (!(c.terminal_time > 0.0)) {
    throw ConfigError("T must be positive");
  }
  if (c.base_intervals < 1) {
    throw ConfigError("nt must be at least 1");
  }
  if (c.levels < 0) {
    throw ConfigError("levels must be nonnegative");
  }
  if (c.threads < 1) {
    throw ConfigError("threads must be at least 1");
  }
  if (!(c.memory_limit_bytes > 0.0)) {
    throw ConfigError("memory_limit must be positive");
  }
}

/// Reads flat key=value text; '#' starts a comment.
inline RunConfig parse_config(std::istream& in, RunConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string body = detail::trim(line);
    if (body.empty()) {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(base, detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)));
  }
  validate(base);
  return base;
}

inline RunConfig parse_config(const std::string& text, RunConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, std::move(base));
}

inline std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "spatial=";
  if (c.spatial == SpatialKind::Square) {
    out << "square:" << c.spatial_cells << '\n';
  } else {
    out << "interval:" << c.spatial_cells << ',' << detail::format_real(c.interval_length) << '\n';
  }
  out << "temporal="
      << (c.temporal == TemporalKind::Uniform ? std::string("uniform")
                                              : "graded:" + detail::format_real(c.grading))
      << '\n';
  out << "T=" << detail::format_real(c.terminal_time) << '\n';
  out << "nt=" << c.base_intervals << '\n';
  out << "levels=" << c.levels << '\n';
  out << "solver=" << to_string(c.solver) << '\n';
  out << "threads=" << c.threads << '\n';
  out << "problem="
      << (c.problem == ProblemKind::Manufactured ? "manufactured"
          : c.problem == ProblemKind::SineMode   ? "sine"
                                                 : "zero")
      << '\n';
  out << "format=" << (c.format == OutputFormat::Table ? "table" : "csv") << '\n';
  if (!c.out.empty()) {
    out << "out=" << c.out << '\n';
  }
  out << "memory_limit=" << detail::format_real(c.memory_limit_bytes) << '\n';
  out << "assembly_column=" << (c.assembly_column ? 1 : 0) << '\n';
  return out.str();
}

struct ConvergenceRow {
  Index n = 0;
  Real hx = 0.0;
  Real ht = 0.0;
  Real err_l2 = 0.0;
  std::optional<Real> eoc_l2;
  Real err_h1 = 0.0;
  std::optional<Real> eoc_h1;
  double solve_seconds = 0.0;
  Real kappa2 = 1.0;
  // Not part of the CSV schema.
  double assembly_seconds = 0.0;
  Real relative_residual = 0.0;
};

inline SpatialMesh initial_spatial_mesh(const RunConfig& c) {
  return c.spatial == SpatialKind::Square ? build_structured_square(c.spatial_cells)
                                          : build_interval(c.spatial_cells, c.interval_length);
}

inline TemporalMesh initial_temporal_mesh(const RunConfig& c) {
  return c.temporal == TemporalKind::Uniform
             ? uniform_temporal_mesh(c.terminal_time, c.base_intervals)
             : graded_temporal_mesh(c.terminal_time, c.base_intervals, c.grading);
}

inline ExactSolution exact_solution_for(const RunConfig& c) {
  const int dim = c.spatial == SpatialKind::Square ? 2 : 1;
  const Real length = dim == 2 ? 1.0 : c.interval_length;
  switch (c.problem) {
  case ProblemKind::Manufactured:
    return dim == 2 ? manufactured_solution_square() : manufactured_solution_interval(length);
  case ProblemKind::SineMode:
    return sine_mode_solution(dim, length);
  case ProblemKind::Zero:
    break;
  }
  return zero_solution();
}

/// Rough peak memory of one level: a handful of n-vectors plus the dense
/// temporal factors.
inline double estimate_peak_bytes(Index nx, Index nt) {
  const double n = static_cast<double>(nx) * static_cast<double>(nt);
  return 16.0 * (10.0 * n + 6.0 * static_cast<double>(nt) * static_cast<double>(nt));
}

/// Raised when a level would exceed the configured memory limit.
class MemoryGuardError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// Solver failure annotated with the level and variant.
class LevelSolveError : public Error {
public:
  using Error::Error;
};

/**
 * @brief Runs levels J = 0..J_max: spatial mesh refined J times, temporal
 * mesh bisected J times. Solve time excludes assembly and error evaluation.
 */
inline std::vector<ConvergenceRow>
run_convergence(const RunConfig& config,
                const std::function<void(int, const ConvergenceRow&)>& on_level = {}) {
  validate(config);
  const ExactSolution exact = exact_solution_for(config);
  SpatialMesh mesh_x = initial_spatial_mesh(config);
  TemporalMesh mesh_t = initial_temporal_mesh(config);
  const auto initial = [&exact](const Point& x) { return exact.initial(x); };

  std::vector<ConvergenceRow> rows;
  for (int level = 0; level <= config.levels; ++level) {
    if (level > 0) {
      mesh_x = refine_uniform(mesh_x);
      mesh_t = refine_bisect(mesh_t);
    }
    const Index nx = mesh_x.num_dofs();
    const Index nt = mesh_t.num_dofs();
    if (estimate_peak_bytes(nx, nt) > config.memory_limit_bytes) {
      throw MemoryGuardError("level " + std::to_string(level) + " needs about " +
                             std::to_string(estimate_peak_bytes(nx, nt) / (1 << 20)) +
                             " MiB, above memory_limit");
    }

    const auto t_asm = std::chrono::steady_clock::now();
    const SpatialMatrices sx = assemble_spatial(mesh_x);
    const TemporalMatrices st = assemble_temporal(mesh_t);
    const BlockVector rhs = assemble_rhs(mesh_x, mesh_t, exact.source, initial, sx.stiffness);
    const double assembly =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_asm).count();

    SolveReport report;
    try {
      report = solve_spacetime(sx.mass, sx.stiffness, st.mass, st.derivative, rhs,
                               {config.solver, config.threads});
    } catch (const Error& e) {
      throw LevelSolveError("level " + std::to_string(level) + ", solver " +
                            to_string(config.solver) + ": " + e.what());
    }
    const ErrorPair err = spacetime_errors(report.solution, exact, mesh_x, mesh_t, config.threads);

    ConvergenceRow row;
    row.n = nx * nt;
    row.hx = mesh_size(mesh_x);
    row.ht = mesh_t.max_step();
    row.err_l2 = err.l2;
    row.err_h1 = err.h1;
    if (!rows.empty() && rows.back().err_l2 > 0.0 && err.l2 > 0.0) {
      row.eoc_l2 = eoc({rows.back().err_l2, err.l2}).front();
    }
    if (!rows.empty() && rows.back().err_h1 > 0.0 && err.h1 > 0.0) {
      row.eoc_h1 = eoc({rows.back().err_h1, err.h1}).front();
    }
    row.solve_seconds = report.solve_seconds;
    row.kappa2 = report.kappa2;
    row.assembly_seconds = assembly;
    row.relative_residual = report.relative_residual;
    rows.push_back(row);
    if (on_level) {
      on_level(level, row);
    }
  }
  return rows;
}

namespace detail {

inline std::string sci(Real v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

inline std::string fixed(Real v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

} // namespace detail

inline constexpr std::string_view kCsvHeader = "n,hx,ht,errL2,eocL2,errH1,eocH1,solve_s,kappa2";

/// CSV (4 significant digits) or a fixed-width table in the usual
/// convergence-table column order. Missing eoc values print as "-".
inline std::string emit(const std::vector<ConvergenceRow>& rows, OutputFormat format,
                        bool assembly_column = false) {
  if (rows.empty()) {
    throw InvalidArgument("emit: no rows");
  }
  std::ostringstream out;
  const auto opt = [](const std::optional<Real>& v, auto&& fmt) {
    return v ? fmt(*v) : std::string("-");
  };
  if (format == OutputFormat::Csv) {
    out << kCsvHeader << (assembly_column ? ",assembly_s" : "") << '\n';
    const auto f = [](Real v) { return detail::sci(v, 3); };
    for (const auto& r : rows) {
      out << r.n << ',' << f(r.hx) << ',' << f(r.ht) << ',' << f(r.err_l2) << ','
          << opt(r.eoc_l2, f) << ',' << f(r.err_h1) << ',' << opt(r.eoc_h1, f) << ','
          << f(r.solve_seconds) << ',' << f(r.kappa2);
      if (assembly_column) {
        out << ',' << f(r.assembly_seconds);
      }
      out << '\n';
    }
    return out.str();
  }
  char line[256];
  std::snprintf(line, sizeof line, "%12s  %8s  %8s  %10s  %5s  %10s  %5s  %10s  %8s", "n", "h_x",
                "h_t", "L2(Q)", "eoc", "H1(Q)", "eoc", "solve [s]", "kappa2");
  out << line << (assembly_column ? "  assembly [s]" : "") << '\n';
  const auto e1 = [](Real v) { return detail::sci(v, 1); };
  const auto f1 = [](Real v) { return detail::fixed(v, 1); };
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%12lld  %8s  %8s  %10s  %5s  %10s  %5s  %10s  %8s",
                  static_cast<long long>(r.n), e1(r.hx).c_str(), e1(r.ht).c_str(),
                  e1(r.err_l2).c_str(), opt(r.eoc_l2, f1).c_str(), e1(r.err_h1).c_str(),
                  opt(r.eoc_h1, f1).c_str(), detail::fixed(r.solve_seconds, 3).c_str(),
                  e1(r.kappa2).c_str());
    out << line;
    if (assembly_column) {
      out << "  " << detail::fixed(r.assembly_seconds, 3);
    }
    out << '\n';
  }
  return out.str();
}

/// Parses CSV produced by emit(..., Csv).
inline std::vector<ConvergenceRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind(kCsvHeader, 0) != 0) {
    throw InvalidArgument("parse_csv: missing header");
  }
  std::vector<ConvergenceRow> rows;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) {
      continue;
    }
    std::vector<std::string> f;
    std::istringstream fields(line);
    for (std::string cell; std::getline(fields, cell, ',');) {
      f.push_back(detail::trim(cell));
    }
    if (f.size() < 9) {
      throw InvalidArgument("parse_csv: expected 9 fields in '" + line + "'");
    }
    const auto opt = [](const std::string& s) -> std::optional<Real> {
      if (s == "-") {
        return std::nullopt;
      }
      return std::stod(s);
    };
    ConvergenceRow r;
    r.n = std::stoll(f[0]);
    r.hx = std::stod(f[1]);
    r.ht = std::stod(f[2]);
    r.err_l2 = std::stod(f[3]);
    r.eoc_l2 = opt(f[4]);
    r.err_h1 = std::stod(f[5]);
    r.eoc_h1 = opt(f[6]);
    r.solve_seconds = std::stod(f[7]);
    r.kappa2 = std::stod(f[8]);
    if (f.size() > 9) {
      r.assembly_seconds = std::stod(f[9]);
    }
    rows.push_back(r);
  }
  return rows;
}

} // namespace stcg
