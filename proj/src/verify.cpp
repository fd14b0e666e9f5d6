#include "fracdiff/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fracdiff/cli_io.hpp"
#include "fracdiff/diagnostics.hpp"
#include "fracdiff/errors.hpp"
#include "fracdiff/grunwald.hpp"
#include "fracdiff/operators.hpp"
#include "fracdiff/timestepper.hpp"

namespace fracdiff {

namespace {

using BC = BoundaryCondition;
using DF = DerivativeForm;

constexpr std::array<std::string_view, 8> kSuites{
    "identities", "matrices", "conservation", "positivity", "steady", "decay",
    "caputo-negativity", "all"};

constexpr std::array<double, 3> kAlphas{1.2, 1.5, 1.8};

// Desk-scale grid for the run-based suites.
constexpr std::size_t kDeskN = 128;
constexpr std::size_t kSteadyN = 512;

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << std::scientific << v;
  return os.str();
}

struct Suite {
  std::vector<CheckResult> results;
  void check(std::string name, bool ok, std::string detail = {}) {
    results.push_back({std::move(name), ok, std::move(detail)});
  }
};

std::vector<SchemeSpec> supported_specs(double alpha, std::size_t n, bool with_caputo) {
  std::vector<SchemeSpec> specs;
  for (DF form : {DF::RiemannLiouville, DF::PatieSimon}) {
    for (BC left : {BC::Absorbing, BC::Reflecting}) {
      for (BC right : {BC::Absorbing, BC::Reflecting}) {
        specs.push_back({form, left, right, alpha, 1.0, n});
      }
    }
  }
  if (with_caputo) specs.push_back({DF::Caputo, BC::Absorbing, BC::Absorbing, alpha, 1.0, n});
  return specs;
}

std::string label(const SchemeSpec& s) {
  auto bc = [](BC b) { return b == BC::Absorbing ? 'A' : 'R'; };
  return std::string(to_string(s.form)) + "-" + bc(s.left) + bc(s.right);
}

std::vector<double> every_step(std::size_t steps, double dt) {
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = static_cast<double>(k) * dt;
  return t;
}

std::vector<CheckResult> identities() {
  Suite s;
  const std::size_t m = 10000;
  for (double a : kAlphas) {
    const auto g = grunwald_weights(a, m);
    const auto g1 = grunwald_weights(a - 1.0, m);
    const double rec = recursion_defect(g);
    s.check("recursion a=" + num(a), rec <= 1e-14, "defect " + num(rec));
    const double cum = cumulative_sum_defect(a, m);
    s.check("cumulative sum a=" + num(a), cum <= 1e-12, "defect " + num(cum));
    double sum = 0.0;
    for (double v : g.values()) sum += v;
    s.check("sum to zero a=" + num(a), std::abs(sum) <= 2.0 * std::abs(g1[m]),
            "|sum| " + num(std::abs(sum)));
    bool signs = g[1] < 0.0;
    for (std::size_t i = 2; i <= m; ++i) signs = signs && g[i] > 0.0;
    s.check("sign pattern a=" + num(a), signs);
    double worst = 0.0;
    for (std::size_t j = 1000; j <= m; j += 1000) {
      const double ratio =
          g1[j] * std::tgamma(2.0 - a) / (1.0 - a) * std::pow(static_cast<double>(j), a);
      worst = std::max(worst, std::abs(ratio - 1.0));
    }
    s.check("tail asymptotics a=" + num(a), worst < 0.01, "max |ratio-1| " + num(worst));
  }
  return s.results;
}

std::vector<CheckResult> matrices() {
  Suite s;
  {
    const auto b = build_matrix({DF::RiemannLiouville, BC::Reflecting, BC::Reflecting, 1.5, 1.0, 2});
    const double expected[3][3] = {{-0.5, 0.375, 0.125}, {1.0, -1.5, 0.5}, {0.0, 1.0, -1.0}};
    double err = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) err = std::max(err, std::abs(b(i, j) - expected[i][j]));
    s.check("hand 3x3 rl-RR", err <= 1e-15, "max err " + num(err));
  }
  for (double a : kAlphas) {
    for (std::size_t n : {std::size_t{2}, std::size_t{8}, std::size_t{64}}) {
      const double tol = 1e-12 * static_cast<double>(n);
      for (const auto& spec : supported_specs(a, n, true)) {
        const auto b = build_matrix(spec);
        const std::string tag = label(spec) + " a=" + num(a) + " n=" + std::to_string(n);
        bool hessenberg = true;
        for (std::size_t i = 0; i <= n; ++i)
          for (std::size_t j = 0; j + 1 < i; ++j) hessenberg = hessenberg && b(i, j) == 0.0;
        s.check("structure " + tag, hessenberg);

        bool cols = true;
        for (std::size_t i = 0; i <= n; ++i) {
          if (spec.left == BC::Absorbing) cols = cols && b(i, 0) == 0.0;
          if (spec.right == BC::Absorbing) cols = cols && b(i, n) == 0.0;
        }
        s.check("absorbing columns " + tag, cols);

        if (spec.form != DF::Caputo) {
          bool signs = true;
          for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j <= n; ++j)
              if (i != j) signs = signs && b(i, j) >= 0.0;
          s.check("off-diagonal sign " + tag, signs);
        }

        if (spec.left == BC::Reflecting && spec.right == BC::Reflecting) {
          double worst = 0.0;
          for (double r : row_sums(b)) worst = std::max(worst, std::abs(r));
          s.check("row sums " + tag, worst <= tol, "max " + num(worst));
          if (spec.form == DF::PatieSimon) {
            const double col = b.entries().colwise().sum().cwiseAbs().maxCoeff();
            s.check("column sums " + tag, col <= tol, "max " + num(col));
          }
        }

        if (spec.form == DF::PatieSimon && spec.left == BC::Absorbing) {
          auto rl_spec = spec;
          rl_spec.form = DF::RiemannLiouville;
          const auto rl = build_matrix(rl_spec);
          const auto rows = static_cast<Eigen::Index>(n);
          const bool same = b.entries().bottomRows(rows) == rl.entries().bottomRows(rows);
          s.check("left-absorbing ps==rl rows 1..n " + tag, same);
        }

        if (spec.form == DF::Caputo && n >= 4) {
          // Node 0 is pinned, so row 1 is the first row carrying mass. Negative
          // transfer rates out of it are what break positivity.
          bool neg = false, pos = false;
          for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j <= n; ++j)
              if (i != j) {
                if (i == 1) neg = neg || b(i, j) < 0.0;
                pos = pos || b(i, j) > 0.0;
              }
          s.check("caputo negative rates out of node 1 " + tag, neg && pos);
        }
      }
    }
  }
  try {
    build_matrix({DF::Caputo, BC::Reflecting, BC::Reflecting, 1.5, 1.0, 8});
    s.check("caputo-RR rejected", false, "no exception");
  } catch (const UnsupportedCombination&) {
    s.check("caputo-RR rejected", true);
  }
  return s.results;
}

SolverConfig desk_config(const SchemeSpec& spec, Method method, double dt, std::size_t steps) {
  SolverConfig cfg;
  cfg.spec = spec;
  cfg.method = method;
  cfg.dt = dt;
  cfg.t_end = dt * static_cast<double>(steps);
  cfg.snapshot_times = {0.0, cfg.t_end};
  return cfg;
}

std::vector<CheckResult> conservation() {
  Suite s;
  const std::size_t steps = 1000;
  for (DF form : {DF::RiemannLiouville, DF::PatieSimon}) {
    const SchemeSpec spec{form, BC::Reflecting, BC::Reflecting, 1.5, 1.0, kDeskN};
    const double limit = stability_limit(spec.alpha, spec.diffusivity, spec.spacing());
    for (auto [method, dt] : {std::pair{Method::Explicit, limit / 2.0},
                              std::pair{Method::Implicit, 1e-3}}) {
      const auto series = run_simulation(desk_config(spec, method, dt, steps));
      double drift = 0.0;
      for (double m : series.step_mass) drift = std::max(drift, std::abs(m - series.step_mass[0]));
      s.check("mass " + label(spec) + " " + std::string(to_string(method)), drift <= 1e-9,
              "max drift " + num(drift));
    }
  }
  for (const auto& spec : supported_specs(1.5, kDeskN, false)) {
    const double dt = stability_limit(spec.alpha, spec.diffusivity, spec.spacing()) / 2.0;
    const auto series = run_simulation(desk_config(spec, Method::Explicit, dt, steps));
    double gap = 0.0;
    for (std::size_t k = 0; k < series.step_mass.size(); ++k) {
      gap = std::max(gap, std::abs(series.step_mass[k] + series.step_absorbed[k] -
                                   series.step_mass[0]));
    }
    s.check("ledger " + label(spec), gap <= 1e-9, "max gap " + num(gap));
  }
  return s.results;
}

std::vector<CheckResult> positivity() {
  Suite s;
  const std::size_t steps = 1000;
  for (const auto& spec : supported_specs(1.5, kDeskN, false)) {
    const double dt = stability_limit(spec.alpha, spec.diffusivity, spec.spacing()) / 2.0;
    auto cfg = desk_config(spec, Method::Explicit, dt, steps);
    cfg.snapshot_times = every_step(steps, dt);
    cfg.snapshot_times.back() = cfg.t_end;
    const auto scan = negativity_scan(run_simulation(cfg));
    s.check("nonnegative " + label(spec), scan.min_value >= -1e-12, "min " + num(scan.min_value));
  }
  return s.results;
}

std::vector<CheckResult> steady() {
  Suite s;
  double first_diff[2] = {0.0, 0.0};
  int idx = 0;
  for (DF form : {DF::RiemannLiouville, DF::PatieSimon}) {
    const SchemeSpec spec{form, BC::Reflecting, BC::Reflecting, 1.5, 1.0, kSteadyN};
    SolverConfig cfg;
    cfg.spec = spec;
    cfg.dt = 1e-3;
    cfg.t_end = 2.0;
    cfg.snapshot_times = {0.5, 1.0, 2.0};
    const auto series = run_simulation(cfg);
    const auto ref = steady_state_reference(spec);
    std::vector<double> d;
    for (const auto& u : series.snapshots) d.push_back(l1_distance_interior(u, ref));
    // Once the run sits on the discrete steady state the distance to the
    // continuous reference is flat; 1e-6 absorbs that floor.
    s.check("distance decreasing " + label(spec), d[0] > d[1] && d[2] <= d[1] + 1e-6,
            num(d[0]) + " > " + num(d[1]) + " > " + num(d[2]));
    const auto& u = series.snapshots.back();
    first_diff[idx++] = std::abs(u[1] - u[0]) / u.spacing();
  }
  s.check("rl left slope >> ps left slope", first_diff[0] > 10.0 * first_diff[1],
          num(first_diff[0]) + " vs " + num(first_diff[1]));
  const auto b = build_matrix({DF::PatieSimon, BC::Reflecting, BC::Reflecting, 1.5, 1.0, kSteadyN});
  const double kernel = b.entries().colwise().sum().cwiseAbs().maxCoeff();
  s.check("ps-RR constant in kernel", kernel <= 1e-12, "|1 B|inf " + num(kernel));
  return s.results;
}

std::vector<CheckResult> decay() {
  Suite s;
  std::vector<double> times;
  for (int k = 0; k <= 20; ++k) times.push_back(0.1 * k);
  for (auto [left, right] : {std::pair{BC::Absorbing, BC::Absorbing},
                             std::pair{BC::Absorbing, BC::Reflecting},
                             std::pair{BC::Reflecting, BC::Absorbing},
                             std::pair{BC::Reflecting, BC::Reflecting}}) {
    const SchemeSpec spec{DF::RiemannLiouville, left, right, 1.5, 1.0, kDeskN};
    SolverConfig cfg;
    cfg.spec = spec;
    cfg.dt = 1e-3;
    cfg.t_end = 2.0;
    cfg.snapshot_times = times;
    const auto series = run_simulation(cfg);
    const double rate = decay_rate(series);
    if (left == BC::Reflecting && right == BC::Reflecting) {
      s.check("no decay " + label(spec), std::abs(rate) < 1e-6, "rate " + num(rate));
      continue;
    }
    bool monotone = true;
    for (std::size_t k = 1; k < series.snapshots.size(); ++k) {
      monotone = monotone && l1_norm(series.snapshots[k]) <= l1_norm(series.snapshots[k - 1]);
    }
    s.check("L1 nonincreasing " + label(spec), monotone);
    s.check("decay rate < 0 " + label(spec), rate < 0.0, "rate " + num(rate));
  }
  return s.results;
}

std::vector<CheckResult> caputo_negativity() {
  Suite s;
  SolverConfig cfg;
  cfg.spec = {DF::Caputo, BC::Absorbing, BC::Absorbing, 1.5, 1.0, 512};
  cfg.dt = 1e-3;
  cfg.t_end = 0.2;
  cfg.initial = InitialCondition::sine_bump();
  cfg.snapshot_times = {0.0, 0.01, 0.04, 0.2};
  const auto scan = negativity_scan(run_simulation(cfg));
  s.check("caputo-AA goes negative", scan.min_value < 0.0,
          "min " + num(scan.min_value) + " at snapshot " + std::to_string(scan.time_index) +
              ", node " + std::to_string(scan.node_index));
  return s.results;
}

std::vector<CheckResult> run_named(std::string_view suite) {
  if (suite == "identities") return identities();
  if (suite == "matrices") return matrices();
  if (suite == "conservation") return conservation();
  if (suite == "positivity") return positivity();
  if (suite == "steady") return steady();
  if (suite == "decay") return decay();
  if (suite == "caputo-negativity") return caputo_negativity();
  return {};
}

}  // namespace

std::span<const std::string_view> verify_suite_names() { return kSuites; }

bool is_verify_suite(std::string_view name) {
  return std::find(kSuites.begin(), kSuites.end(), name) != kSuites.end();
}

std::vector<CheckResult> run_verify_suite(std::string_view suite) {
  if (suite != "all") return run_named(suite);
  // Suites are independent; gather in catalogue order whatever finishes first.
  std::vector<std::future<std::vector<CheckResult>>> jobs;
  for (auto name : kSuites) {
    if (name == "all") continue;
    jobs.push_back(std::async(std::launch::async, [name] {
      auto results = run_named(name);
      for (auto& r : results) r.name = std::string(name) + ": " + r.name;
      return results;
    }));
  }
  std::vector<CheckResult> all;
  for (auto& job : jobs) {
    auto part = job.get();
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

int run_verify(std::string_view suite, std::ostream& out) {
  if (!is_verify_suite(suite)) {
    out << "unknown suite '" << suite << "'\n";
    return 2;
  }
  const auto results = run_verify_suite(suite);
  std::size_t failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS  " : "FAIL  ") << r.name;
    if (!r.detail.empty()) out << "  [" << r.detail << ']';
    out << '\n';
    if (!r.passed) ++failed;
  }
  out << results.size() - failed << '/' << results.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace fracdiff
