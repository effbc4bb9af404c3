#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "stcg/stcg.hpp"

namespace {

constexpr int kExitSolverFailure = 2;
constexpr int kExitConfigError = 3;

struct Flags {
  std::string config_path;
  std::map<std::string, std::string> settings;
};

void add_run_options(CLI::App& cmd, Flags& flags) {
  const auto setting = [&cmd, &flags](const std::string& name, const std::string& key,
                                      const std::string& help) {
    cmd.add_option_function<std::string>(
        name, [&flags, key](const std::string& v) { flags.settings[key] = v; }, help);
  };
  cmd.add_option("--config", flags.config_path, "key=value configuration file");
  setting("--spatial", "spatial", "square:<m> | interval:<m>,<L>");
  setting("--temporal", "temporal", "uniform | graded:<q>");
  setting("--T", "T", "terminal time");
  setting("--nt", "nt", "temporal elements at level 0");
  setting("--levels", "levels", "finest refinement level J_max");
  setting("--solver", "solver", "bs (Bartels-Stewart) | fd (fast diagonalization)");
  setting("--threads", "threads", "thread budget for the spatial solves");
  setting("--problem", "problem", "manufactured | sine | zero");
  setting("--out", "out", "write results to this file instead of stdout");
  setting("--format", "format", "table | csv");
  setting("--memory-limit", "memory_limit", "per-level memory guard in bytes");
  cmd.add_flag_callback(
      "--assembly-time", [&flags] { flags.settings["assembly_column"] = "1"; },
      "add an assembly-time column");
}

stcg::RunConfig build_config(const Flags& flags) {
  stcg::RunConfig config;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) {
      throw stcg::ConfigError("cannot open config file '" + flags.config_path + "'");
    }
    config = stcg::parse_config(in);
  }
  for (const auto& [key, value] : flags.settings) {
    stcg::apply_setting(config, key, value);
  }
  stcg::validate(config);
  return config;
}

void write_output(const stcg::RunConfig& config, const std::string& text) {
  if (config.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(config.out);
  if (!out || !(out << text)) {
    throw stcg::Error("cannot write '" + config.out + "'");
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time Galerkin solver for the linear Schroedinger equation"};
  app.require_subcommand(1);
  Flags solve_flags;
  Flags conv_flags;
  auto* solve = app.add_subcommand("solve", "solve a single level and report the result");
  auto* convergence = app.add_subcommand("convergence", "run levels 0..J_max");
  add_run_options(*solve, solve_flags);
  add_run_options(*convergence, conv_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    const bool single = solve->parsed();
    stcg::RunConfig config = build_config(single ? solve_flags : conv_flags);
    if (single) {
      config.levels = 0;
    }
    const auto rows = stcg::run_convergence(config, [&](int level, const stcg::ConvergenceRow& r) {
      std::cerr << "level " << level << ": n = " << r.n << ", solve " << r.solve_seconds
                << " s, assembly " << r.assembly_seconds << " s, relative residual "
                << r.relative_residual << '\n';
    });
    write_output(config, stcg::emit(rows, config.format, config.assembly_column));
  } catch (const stcg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const stcg::InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const stcg::LevelSolveError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    if (std::string(e.what()).find("Bartels-Stewart") != std::string::npos) {
      std::cerr << "hint: rerun with --solver bs\n";
    }
    return kExitSolverFailure;
  } catch (const stcg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  }
  return 0;
}
