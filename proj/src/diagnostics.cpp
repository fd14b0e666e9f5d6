#include "fracdiff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracdiff/errors.hpp"

namespace fracdiff {

namespace {

// Ordinary least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y) {
  const auto count = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DegenerateInput("abscissae are all equal");
  return sxy / sxx;
}

}  // namespace

double total_mass(const GridFunction& u) {
  double s = 0.0;
  for (double v : u.values()) s += v;
  return s * u.spacing();
}

double l1_norm(const GridFunction& u) {
  double s = 0.0;
  for (double v : u.values()) s += std::abs(v);
  return s * u.spacing();
}

SteadyStateReference steady_state_reference(const SchemeSpec& spec) {
  spec.validate();
  const bool reflecting_both = spec.left == BoundaryCondition::Reflecting &&
                               spec.right == BoundaryCondition::Reflecting;
  if (!reflecting_both) return {SteadyStateReference::Kind::Zero, GridFunction(spec.n)};

  if (spec.form == DerivativeForm::PatieSimon) {
    return {SteadyStateReference::Kind::Constant,
            GridFunction::sample(spec.n, [](double) { return 1.0; })};
  }
  const double a = spec.alpha;
  // pow(0, a-2) is +inf, which marks node 0 as excluded.
  return {SteadyStateReference::Kind::PowerLaw,
          GridFunction::sample(spec.n, [a](double x) { return (a - 1.0) * std::pow(x, a - 2.0); })};
}

double l1_distance_interior(const GridFunction& u, const SteadyStateReference& ref) {
  if (u.size() != ref.values.size()) {
    throw DimensionMismatch("solution and reference live on different grids");
  }
  double s = 0.0;
  for (std::size_t j = 1; j < u.size(); ++j) s += std::abs(u[j] - ref.values[j]);
  return s * u.spacing();
}

NegativityScan negativity_scan(const TimeSeries& series) {
  if (series.snapshots.empty()) throw EmptySeries("time series has no snapshots");
  NegativityScan scan{std::numeric_limits<double>::infinity(), 0, 0};
  for (std::size_t k = 0; k < series.snapshots.size(); ++k) {
    const auto& u = series.snapshots[k];
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (u[j] < scan.min_value) scan = {u[j], k, j};
    }
  }
  return scan;
}

double fit_log_slope(std::span<const double> times, std::span<const double> norms) {
  if (times.size() != norms.size()) throw DimensionMismatch("times and norms differ in length");
  if (times.size() < 3) throw DegenerateInput("need at least three points for a decay fit");
  std::vector<double> logs;
  logs.reserve(norms.size());
  for (double v : norms) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DegenerateInput("norm is zero or not finite inside the fit window");
    }
    logs.push_back(std::log(v));
  }
  return ls_slope(times, logs);
}

double decay_rate(const TimeSeries& series) {
  const std::size_t count = series.snapshots.size();
  if (count < 3) throw DegenerateInput("need at least three snapshots for a decay fit");
  const std::size_t window = std::max<std::size_t>(3, (count + 1) / 2);
  const std::size_t first = count - window;
  std::vector<double> times(series.times.begin() + static_cast<std::ptrdiff_t>(first),
                            series.times.end());
  std::vector<double> norms;
  for (std::size_t k = first; k < count; ++k) norms.push_back(l1_norm(series.snapshots[k]));
  return fit_log_slope(times, norms);
}

BoundaryFlux boundary_flux_check(const TimeSeries& series) {
  if (series.snapshots.empty()) throw EmptySeries("time series has no snapshots");
  const SchemeSpec& spec = series.spec;
  if (spec.form == DerivativeForm::Caputo) {
    throw UnsupportedForm("no fractional flux is defined for the Caputo form");
  }
  const auto q = flux_profile(series.snapshots.back(), spec.alpha, spec.diffusivity, spec.form);
  return {q[1], q[q.intervals()]};
}

double convergence_order(std::span<const std::pair<double, double>> h_error) {
  if (h_error.size() < 3) throw DegenerateInput("need at least three (h, error) pairs");
  std::vector<double> log_h, log_e;
  for (std::size_t i = 0; i < h_error.size(); ++i) {
    const auto [h, e] = h_error[i];
    if (!(h > 0.0) || !(e > 0.0)) throw DegenerateInput("h and error must be positive");
    if (i > 0 && !(h < h_error[i - 1].first)) {
      throw DegenerateInput("h must be strictly decreasing");
    }
    log_h.push_back(std::log(h));
    log_e.push_back(std::log(e));
  }
  return ls_slope(log_h, log_e);
}

DiagnosticsReport make_report(const TimeSeries& series) {
  DiagnosticsReport report{};
  report.times = series.times;
  report.mass_trace = series.mass_trace;
  report.absorbed_cumulative = series.absorbed_cumulative;
  report.minimum = negativity_scan(series);

  const auto ref = steady_state_reference(series.spec);
  report.steady_kind = ref.kind;
  for (const auto& u : series.snapshots) {
    report.steady_state_distance.push_back(l1_distance_interior(u, ref));
  }

  try {
    report.decay_rate = decay_rate(series);
  } catch (const DegenerateInput&) {
    report.decay_rate.reset();
  }

  const SchemeSpec& spec = series.spec;
  const bool any_reflecting = spec.left == BoundaryCondition::Reflecting ||
                              spec.right == BoundaryCondition::Reflecting;
  if (any_reflecting && spec.form != DerivativeForm::Caputo) {
    report.boundary_flux = boundary_flux_check(series);
  }
  return report;
}

}  // namespace fracdiff
