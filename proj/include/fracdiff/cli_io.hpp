#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fracdiff/diagnostics.hpp"
#include "fracdiff/grunwald.hpp"
#include "fracdiff/operators.hpp"
#include "fracdiff/timestepper.hpp"

namespace fracdiff {

struct SolveCommand {
  SolverConfig config;
  std::filesystem::path out;
  std::optional<std::filesystem::path> report;
};

struct MatrixCommand {
  SchemeSpec spec;
  std::filesystem::path out;
};

struct WeightsCommand {
  double order = 1.5;
  std::size_t m = 0;
  std::filesystem::path out;
};

struct VerifyCommand {
  std::string suite;
};

struct FigureCommand {
  bool list = false;
  int id = 0;
  std::filesystem::path out;
  std::size_t n = 1000;
  double dt = 1e-3;
  Method method = Method::Implicit;
};

using CliCommand =
    std::variant<SolveCommand, MatrixCommand, WeightsCommand, VerifyCommand, FigureCommand>;

/// Parses the arguments after the program name. Throws UsageError with a
/// one-line reason.
CliCommand parse_args(std::span<const std::string> args);

/// Executes a parsed command. Returns the process exit code.
int run_command(const CliCommand& command, std::ostream& out, std::ostream& err);

/// Full CLI entry point: parse, run, map errors onto exit codes
/// (0 ok, 1 failure, 2 usage).
int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

// File formats.

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Long format `t,x,u`, rows by snapshot then node.
void write_timeseries_csv(const TimeSeries& series, std::ostream& os);

/// Writes `path` and the sidecar `<path>.meta.json`.
void emit_timeseries_csv(const TimeSeries& series, const std::filesystem::path& path);

struct CsvSnapshots {
  std::vector<double> times;
  std::vector<GridFunction> snapshots;
};

CsvSnapshots read_timeseries_csv(std::istream& is);

/// One matrix row per line, entries in %.16e.
void write_matrix_csv(const IterationMatrix& b, std::ostream& os);

/// Header `i,g`.
void write_weights_csv(const GrunwaldWeights& weights, std::ostream& os);

/// Flat `key=value` block.
void write_report_text(const DiagnosticsReport& report, std::ostream& os);

/// Per-snapshot rows `t,mass,absorbed,steady_state_distance`.
void write_report_csv(const DiagnosticsReport& report, std::ostream& os);

// Figure catalogue.

struct FigureProtocol {
  int id;
  std::string_view caption;
  DerivativeForm form;
  BoundaryCondition left;
  BoundaryCondition right;
  InitialCondition::Kind initial;
  std::vector<double> snapshot_times;
};

std::span<const FigureProtocol> figure_catalogue();

/// Solver configuration reproducing one figure (alpha 1.5, C 1).
SolverConfig figure_config(int id, std::size_t n = 1000, double dt = 1e-3,
                           Method method = Method::Implicit);

}  // namespace fracdiff
