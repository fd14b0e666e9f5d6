#include "fracdiff/timestepper.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>

#include "fracdiff/errors.hpp"

namespace fracdiff {

namespace {

using Eigen::Index;

Eigen::Map<const Eigen::VectorXd> as_vector(const GridFunction& u) {
  return {u.values().data(), static_cast<Index>(u.size())};
}

void require_same_size(const GridFunction& u, const IterationMatrix& b) {
  if (u.size() != b.size()) {
    throw DimensionMismatch("grid has " + std::to_string(u.size()) + " nodes, matrix is " +
                            std::to_string(b.size()) + " square");
  }
}

// Number of whole steps needed to reach t, tolerating roundoff in t / dt.
std::size_t steps_to_reach(double t, double dt) {
  const double k = std::ceil(t / dt - 1e-9);
  return k <= 0.0 ? 0 : static_cast<std::size_t>(k);
}

double mass_of(const GridFunction& u) {
  double s = 0.0;
  for (double v : u.values()) s += v;
  return s * u.spacing();
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<double> read_column_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open initial condition file " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto field = trim(std::string_view(line).substr(line.find_last_of(',') + 1));
    if (trim(line).empty() || trim(line).front() == '#') continue;
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end) {
      if (values.empty()) continue;  // header line
      throw IoError("bad number '" + field + "' in " + path.string());
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace

std::string_view to_string(Method method) {
  return method == Method::Explicit ? "explicit" : "implicit";
}

double tent(double x) {
  if (x > 0.3 && x <= 0.5) return 25.0 * x - 7.5;
  if (x > 0.5 && x < 0.7) return -25.0 * x + 17.5;
  return 0.0;
}

double sine_bump(double x) {
  constexpr double pi = std::numbers::pi;
  if (!(x > 0.0 && x < 0.25)) return 0.0;
  const double amplitude = 64.0 * pi * pi * pi / (pi * pi - 4.0);
  return amplitude * (x - 0.25) * (x - 0.25) * std::sin(4.0 * pi * x);
}

InitialCondition InitialCondition::from_file(std::filesystem::path path) {
  InitialCondition ic(Kind::FromFile);
  ic.path_ = std::move(path);
  return ic;
}

GridFunction InitialCondition::sample(std::size_t intervals) const {
  switch (kind_) {
    case Kind::Tent: return GridFunction::sample(intervals, fracdiff::tent);
    case Kind::SineBump: return GridFunction::sample(intervals, fracdiff::sine_bump);
    case Kind::Uniform: return GridFunction::sample(intervals, [](double) { return 1.0; });
    case Kind::FromFile: {
      auto values = read_column_file(path_);
      if (values.size() != intervals + 1) {
        throw IoError(path_.string() + " holds " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(intervals + 1));
      }
      return GridFunction(std::move(values));
    }
  }
  throw InvalidSpec("unknown initial condition");
}

std::string InitialCondition::label() const {
  switch (kind_) {
    case Kind::Tent: return "tent";
    case Kind::SineBump: return "bump";
    case Kind::Uniform: return "uniform";
    case Kind::FromFile: return "file:" + path_.string();
  }
  return "?";
}

double stability_limit(double alpha, double diffusivity, double h) {
  return std::pow(h, alpha) / (diffusivity * alpha);
}

void SolverConfig::validate() const {
  spec.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidSpec("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidSpec("t_end must be positive");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
    throw InvalidSpec("snapshot times must be sorted");
  }
  for (double t : snapshot_times) {
    if (t < 0.0 || t > t_end) throw InvalidSpec("snapshot times must lie in [0, t_end]");
  }
  if (method == Method::Explicit && !allow_unstable) {
    const double limit = stability_limit(spec.alpha, spec.diffusivity, spec.spacing());
    if (dt > limit * (1.0 + 1e-12)) {
      throw StabilityViolation("explicit dt " + std::to_string(dt) +
                               " exceeds the stability limit h^alpha/(C alpha) = " +
                               std::to_string(limit));
    }
  }
}

std::size_t SolverConfig::step_count() const { return steps_to_reach(t_end, dt); }

GridFunction explicit_step(const GridFunction& u, const IterationMatrix& b, double beta) {
  require_same_size(u, b);
  std::vector<double> next(u.size());
  Eigen::Map<Eigen::VectorXd> v(next.data(), static_cast<Index>(next.size()));
  v = as_vector(u) + beta * (b.entries().transpose() * as_vector(u));
  return GridFunction(std::move(next));
}

ImplicitStepper::ImplicitStepper(const IterationMatrix& b, double beta) {
  const auto size = static_cast<Index>(b.size());
  Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(size, size) - beta * b.entries().transpose();
  lu_.compute(system);
  const auto& factors = lu_.matrixLU();
  const double largest = factors.diagonal().cwiseAbs().maxCoeff();
  const double floor = largest * static_cast<double>(size) * 1e-15;
  for (Index i = 0; i < size; ++i) {
    const double pivot = std::abs(factors(i, i));
    if (!std::isfinite(pivot) || pivot <= floor) {
      throw SingularSystem("I - beta B^T is numerically singular (pivot " +
                           std::to_string(i) + ")");
    }
  }
}

GridFunction ImplicitStepper::step(const GridFunction& u) const {
  if (u.size() != static_cast<std::size_t>(lu_.rows())) {
    throw DimensionMismatch("grid does not match the factorized system");
  }
  std::vector<double> next(u.size());
  Eigen::Map<Eigen::VectorXd> v(next.data(), static_cast<Index>(next.size()));
  v = lu_.solve(as_vector(u));
  return GridFunction(std::move(next));
}

GridFunction implicit_step(const GridFunction& u, const IterationMatrix& b, double beta) {
  require_same_size(u, b);
  return ImplicitStepper(b, beta).step(u);
}

TimeSeries run_simulation(const SolverConfig& config) {
  auto series = run_simulation(config, config.initial.sample(config.spec.n));
  series.initial = config.initial.label();
  return series;
}

TimeSeries run_simulation(const SolverConfig& config, GridFunction initial) {
  config.validate();
  const SchemeSpec& spec = config.spec;
  if (initial.intervals() != spec.n) {
    throw DimensionMismatch("initial condition does not match the spec's grid");
  }

  const IterationMatrix b = build_matrix(spec);
  const double h = spec.spacing();
  const double beta = spec.diffusivity * std::pow(h, -spec.alpha) * config.dt;
  const std::vector<double> rates = absorbed_rates(spec, b);
  const std::size_t n = spec.n;
  const bool pin_left = spec.left == BoundaryCondition::Absorbing;
  const bool pin_right = spec.right == BoundaryCondition::Absorbing;

  std::optional<ImplicitStepper> implicit;
  if (config.method == Method::Implicit) implicit.emplace(b, beta);

  TimeSeries series;
  series.spec = spec;
  series.method = config.method;
  series.dt = config.dt;
  series.t_end = config.t_end;
  series.initial = "custom";
  series.requested_times = config.snapshot_times;

  // Removes mass from pinned absorbing nodes and returns it.
  auto pin = [&](GridFunction& u) {
    double removed = 0.0;
    if (pin_left) {
      removed += u[0] * h;
      u[0] = 0.0;
    }
    if (pin_right) {
      removed += u[n] * h;
      u[n] = 0.0;
    }
    return removed;
  };

  // Mass leaving through the rates while u_k (explicit) or u_{k+1} (implicit)
  // sits on the nodes.
  auto outflow = [&](const GridFunction& u) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) acc += u[i] * rates[i];
    return acc * beta * h;
  };

  GridFunction u = std::move(initial);
  pin(u);
  const double initial_mass = mass_of(u);
  double absorbed = 0.0;

  const std::size_t total_steps = config.step_count();
  std::size_t next_snapshot = 0;
  auto record = [&](std::size_t k) {
    while (next_snapshot < config.snapshot_times.size() &&
           steps_to_reach(config.snapshot_times[next_snapshot], config.dt) <= k) {
      series.times.push_back(static_cast<double>(k) * config.dt);
      series.snapshots.push_back(u);
      series.mass_trace.push_back(mass_of(u));
      series.absorbed_cumulative.push_back(absorbed);
      ++next_snapshot;
    }
  };

  series.step_mass.reserve(total_steps + 1);
  series.step_absorbed.reserve(total_steps + 1);
  series.step_mass.push_back(initial_mass);
  series.step_absorbed.push_back(0.0);
  record(0);

  for (std::size_t k = 1; k <= total_steps; ++k) {
    if (implicit) {
      u = implicit->step(u);
      absorbed += outflow(u);
    } else {
      absorbed += outflow(u);
      u = explicit_step(u, b, beta);
    }
    absorbed += pin(u);
    series.step_mass.push_back(mass_of(u));
    series.step_absorbed.push_back(absorbed);
    record(k);
  }
  return series;
}

}  // namespace fracdiff
