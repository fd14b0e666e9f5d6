#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fracdiff/grid.hpp"
#include "fracdiff/operators.hpp"
#include "fracdiff/timestepper.hpp"

namespace fracdiff {

/// Rectangle rule over all n+1 nodes: h sum_j u_j.
double total_mass(const GridFunction& u);

/// h sum_j |u_j| over all nodes.
double l1_norm(const GridFunction& u);

/// Steady state that a run is expected to approach.
///   PowerLaw: (alpha-1) x^(alpha-2), RL with both sides reflecting (infinite at node 0)
///   Constant: 1, PS with both sides reflecting
///   Zero:     any absorbing side
struct SteadyStateReference {
  enum class Kind { PowerLaw, Constant, Zero };
  Kind kind;
  GridFunction values;
};

SteadyStateReference steady_state_reference(const SchemeSpec& spec);

/// h sum_{j=1}^{n} |u_j - ref_j|. Node 0 is always excluded.
double l1_distance_interior(const GridFunction& u, const SteadyStateReference& ref);

struct NegativityScan {
  double min_value;
  std::size_t time_index;
  std::size_t node_index;
};

NegativityScan negativity_scan(const TimeSeries& series);

/// Least-squares slope of log(norm) against time.
double fit_log_slope(std::span<const double> times, std::span<const double> norms);

/// Exponential decay rate of the L1 norm, fitted on the last half of the
/// snapshots (at least three).
double decay_rate(const TimeSeries& series);

struct BoundaryFlux {
  double left;
  double right;
};

/// Flux at nodes 1 and n of the final snapshot, using the spec's flux form.
BoundaryFlux boundary_flux_check(const TimeSeries& series);

/// Least-squares slope of log(error) against log(h). Needs >= 3 pairs,
/// strictly decreasing h and positive errors.
double convergence_order(std::span<const std::pair<double, double>> h_error);

struct DiagnosticsReport {
  std::vector<double> times;
  std::vector<double> mass_trace;
  std::vector<double> absorbed_cumulative;
  NegativityScan minimum;
  SteadyStateReference::Kind steady_kind;
  std::vector<double> steady_state_distance;
  std::optional<double> decay_rate;
  std::optional<BoundaryFlux> boundary_flux;
  std::optional<double> convergence_order;
};

/// Collects every diagnostic that applies to the series' spec. Decay rate is
/// reported only when a fit is possible; boundary flux only for non-Caputo
/// specs with a reflecting side.
DiagnosticsReport make_report(const TimeSeries& series);

}  // namespace fracdiff
