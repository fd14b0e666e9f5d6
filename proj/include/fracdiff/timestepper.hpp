#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "fracdiff/grid.hpp"
#include "fracdiff/operators.hpp"

namespace fracdiff {

enum class Method { Explicit, Implicit };

std::string_view to_string(Method method);

/// Tent peaked at 0.5 on (0.3, 0.7), unit mass.
double tent(double x);

/// (64 pi^3 / (pi^2 - 4)) (x - 1/4)^2 sin(4 pi x) on (0, 1/4), zero elsewhere.
double sine_bump(double x);

class InitialCondition {
public:
  enum class Kind { Tent, SineBump, Uniform, FromFile };

  static InitialCondition tent() { return InitialCondition(Kind::Tent); }
  static InitialCondition sine_bump() { return InitialCondition(Kind::SineBump); }
  static InitialCondition uniform() { return InitialCondition(Kind::Uniform); }
  static InitialCondition from_file(std::filesystem::path path);

  Kind kind() const { return kind_; }
  const std::filesystem::path& path() const { return path_; }

  /// Nodal samples on n intervals. FromFile reads n+1 numbers, one per line
  /// (last comma-separated column if several; blank, '#' and header lines skipped).
  GridFunction sample(std::size_t intervals) const;

  /// "tent", "bump", "uniform" or "file:PATH", the CLI spelling.
  std::string label() const;

private:
  explicit InitialCondition(Kind kind) : kind_(kind) {}
  Kind kind_;
  std::filesystem::path path_;
};

struct SolverConfig {
  SchemeSpec spec;
  double dt = 1e-3;
  double t_end = 1.0;
  Method method = Method::Implicit;
  std::vector<double> snapshot_times{0.0};
  InitialCondition initial = InitialCondition::tent();
  /// Permit an explicit dt above the stability limit.
  bool allow_unstable = false;

  void validate() const;
  std::size_t step_count() const;
};

/// Snapshots of one run plus the mass ledger.
///
/// mass_trace[k] + absorbed_cumulative[k] == mass_trace[0] up to roundoff. The
/// step_* vectors carry the same ledger after every time step (index 0 is the
/// initial state).
struct TimeSeries {
  SchemeSpec spec;
  Method method = Method::Implicit;
  double dt = 0.0;
  double t_end = 0.0;
  /// InitialCondition::label() of the run, or "custom".
  std::string initial;
  std::vector<double> requested_times;
  std::vector<double> times;
  std::vector<GridFunction> snapshots;
  std::vector<double> mass_trace;
  std::vector<double> absorbed_cumulative;
  std::vector<double> step_mass;
  std::vector<double> step_absorbed;
};

/// h^alpha / (C alpha).
double stability_limit(double alpha, double diffusivity, double h);

/// u + beta u B (row-vector convention).
GridFunction explicit_step(const GridFunction& u, const IterationMatrix& b, double beta);

/// Solves (I - beta B^T) v = u with partial-pivoting LU.
GridFunction implicit_step(const GridFunction& u, const IterationMatrix& b, double beta);

/// Implicit Euler with the factorization of (I - beta B^T) computed once.
class ImplicitStepper {
public:
  ImplicitStepper(const IterationMatrix& b, double beta);
  GridFunction step(const GridFunction& u) const;

private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Runs from the configured initial condition.
TimeSeries run_simulation(const SolverConfig& config);

/// Runs from a caller-supplied initial grid function (config.initial is ignored).
/// Absorbing boundary nodes are pinned to zero before the first step and after
/// every step; the pinned mass is booked as absorbed.
TimeSeries run_simulation(const SolverConfig& config, GridFunction initial);

}  // namespace fracdiff
