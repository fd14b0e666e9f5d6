#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "fracdiff/diagnostics.hpp"
#include "fracdiff/errors.hpp"
#include "fracdiff/timestepper.hpp"

using namespace fracdiff;

namespace {

constexpr auto A = BoundaryCondition::Absorbing;
constexpr auto R = BoundaryCondition::Reflecting;
constexpr auto RL = DerivativeForm::RiemannLiouville;
constexpr auto PS = DerivativeForm::PatieSimon;
constexpr auto CA = DerivativeForm::Caputo;

double max_abs(const GridFunction& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

SolverConfig config_for(SchemeSpec spec, Method method, double dt, double t_end,
                        std::vector<double> snaps) {
  SolverConfig c;
  c.spec = spec;
  c.method = method;
  c.dt = dt;
  c.t_end = t_end;
  c.snapshot_times = std::move(snaps);
  return c;
}

}  // namespace

TEST_CASE("initial conditions") {
  CHECK(tent(0.5) == 5.0);
  CHECK(tent(0.3) == 0.0);
  CHECK(tent(0.7) == 0.0);
  CHECK(std::abs(tent(0.4) - 2.5) <= 1e-15);
  CHECK(sine_bump(0.0) == 0.0);
  CHECK(sine_bump(0.3) == 0.0);
  CHECK(sine_bump(0.1) > 0.0);

  CHECK(std::abs(total_mass(InitialCondition::tent().sample(1000)) - 1.0) <= 1e-3);
  CHECK(std::abs(total_mass(InitialCondition::sine_bump().sample(4000)) - 1.0) <= 1e-3);
  CHECK(InitialCondition::uniform().sample(4) == GridFunction(std::vector<double>(5, 1.0)));

  CHECK(InitialCondition::tent().label() == "tent");
  CHECK(InitialCondition::sine_bump().label() == "bump");
  CHECK(InitialCondition::uniform().label() == "uniform");
}

TEST_CASE("initial condition from a file") {
  const auto dir = std::filesystem::temp_directory_path() / "fracdiff_ic_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "ic.csv";
  {
    std::ofstream out(path);
    out << "x,u\n# comment\n0,0\n0.5,2.5\n\n1,0\n";
  }
  const auto ic = InitialCondition::from_file(path);
  CHECK(ic.label() == "file:" + path.string());
  CHECK(ic.sample(2) == GridFunction(std::vector<double>{0.0, 2.5, 0.0}));
  CHECK_THROWS_AS(ic.sample(3), IoError);
  CHECK_THROWS_AS(InitialCondition::from_file(dir / "missing.csv").sample(2), IoError);
  {
    std::ofstream out(path);
    out << "0\n1\noops\n";
  }
  CHECK_THROWS_AS(ic.sample(2), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("stability limit") {
  const double h = 0.01;
  CHECK(std::abs(stability_limit(2.0, 1.0, h) - h * h / 2.0) <= 1e-18);
  CHECK(std::abs(stability_limit(1.5, 1.0, 0.001) - 2.1081851067789196e-5) <= 1e-18);
  CHECK(std::abs(stability_limit(1.5, 2.0, h) - stability_limit(1.5, 1.0, h) / 2.0) <= 1e-18);
}

TEST_CASE("explicit step hand examples") {
  const auto rr = build_matrix({RL, R, R, 1.5, 1.0, 2});
  const GridFunction spike(std::vector<double>{0.0, 1.0, 0.0});
  const auto next = explicit_step(spike, rr, 0.1);
  CHECK(std::abs(next[0] - 0.1) <= 1e-15);
  CHECK(std::abs(next[1] - 0.85) <= 1e-15);
  CHECK(std::abs(next[2] - 0.05) <= 1e-15);
  CHECK(std::abs(total_mass(next) - total_mass(spike)) <= 1e-15);

  const auto aa = build_matrix({RL, A, A, 1.5, 1.0, 2});
  const auto absorbed = explicit_step(spike, aa, 0.1);
  CHECK(absorbed[0] == 0.0);
  CHECK(std::abs(absorbed[1] - 0.85) <= 1e-15);
  CHECK(absorbed[2] == 0.0);
  CHECK(std::abs(total_mass(spike) - total_mass(absorbed) - 0.075) <= 1e-15);

  const GridFunction zero(2);
  CHECK(explicit_step(zero, rr, 0.1) == zero);
  CHECK_THROWS_AS(explicit_step(GridFunction(3), rr, 0.1), DimensionMismatch);
}

TEST_CASE("implicit step") {
  const auto b = build_matrix({RL, R, R, 1.5, 1.0, 64});
  const auto u = GridFunction::sample(64, tent);
  CHECK(implicit_step(u, b, 0.0) == u);

  const double beta = 1e-6;
  CHECK(max_diff(implicit_step(u, b, beta), explicit_step(u, b, beta)) <= 1e-9 * max_abs(u));

  // The implicit update solves (I - beta B^T) v = u.
  const auto v = implicit_step(u, b, 0.3);
  const auto back = explicit_step(v, b, -0.3);
  CHECK(max_diff(back, u) <= 1e-12 * max_abs(u));

  CHECK_THROWS_AS(implicit_step(GridFunction(3), b, 0.1), DimensionMismatch);
  CHECK_THROWS_AS(ImplicitStepper(b, 0.1).step(GridFunction(5)), DimensionMismatch);
}

TEST_CASE("singular systems are detected") {
  // B = I makes I - 1*B^T the zero matrix.
  const IterationMatrix identity(Eigen::MatrixXd::Identity(3, 3));
  CHECK_THROWS_AS(ImplicitStepper(identity, 1.0), SingularSystem);
  Eigen::MatrixXd nan_matrix = Eigen::MatrixXd::Zero(3, 3);
  nan_matrix(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ImplicitStepper(IterationMatrix(nan_matrix), 1.0), SingularSystem);
}

TEST_CASE("implicit Euler is stable far above the explicit limit") {
  const SchemeSpec spec{RL, A, A, 1.5, 1.0, 64};
  const double dt = 10.0 * stability_limit(1.5, 1.0, spec.spacing());
  std::vector<double> snaps;
  for (int k = 0; k <= 100; ++k) snaps.push_back(k * dt);
  auto config = config_for(spec, Method::Implicit, dt, 100 * dt, snaps);
  config.snapshot_times.back() = config.t_end;
  const auto series = run_simulation(config);
  REQUIRE(series.snapshots.size() == 101);
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& s : series.snapshots) {
    for (double v : s.values()) CHECK(std::isfinite(v));
    const double norm = l1_norm(s);
    CHECK(norm <= previous * (1.0 + 1e-12));
    previous = norm;
  }
}

TEST_CASE("explicit runs above the limit need the override") {
  const SchemeSpec spec{RL, R, R, 1.5, 1.0, 64};
  const double limit = stability_limit(1.5, 1.0, spec.spacing());
  auto config = config_for(spec, Method::Explicit, 2.0 * limit, 10 * limit, {0.0});
  CHECK_THROWS_AS(run_simulation(config), StabilityViolation);
  config.allow_unstable = true;
  CHECK_NOTHROW(run_simulation(config));
  config.allow_unstable = false;
  config.dt = limit;
  CHECK_NOTHROW(run_simulation(config));
  config.method = Method::Implicit;
  config.dt = 2.0 * limit;
  CHECK_NOTHROW(run_simulation(config));
}

TEST_CASE("config validation") {
  auto config = config_for({RL, R, R, 1.5, 1.0, 16}, Method::Implicit, 0.01, 0.1, {0.0, 0.05});
  CHECK_NOTHROW(config.validate());
  CHECK(config.step_count() == 10);
  config.snapshot_times = {0.05, 0.0};
  CHECK_THROWS_AS(config.validate(), InvalidSpec);
  config.snapshot_times = {0.0, 0.2};
  CHECK_THROWS_AS(config.validate(), InvalidSpec);
  config.snapshot_times = {0.0};
  config.dt = 0.0;
  CHECK_THROWS_AS(config.validate(), InvalidSpec);
  config.dt = 0.01;
  config.t_end = -1.0;
  CHECK_THROWS_AS(config.validate(), InvalidSpec);
  config.t_end = 0.1;
  config.spec.form = CA;
  CHECK_THROWS_AS(config.validate(), UnsupportedCombination);
  CHECK_THROWS_AS(run_simulation(config_for({RL, R, R, 1.5, 1.0, 16}, Method::Implicit, 0.01, 0.1,
                                            {0.0}),
                                 GridFunction(8)),
                  DimensionMismatch);
}

TEST_CASE("zero initial condition stays zero") {
  for (auto method : {Method::Explicit, Method::Implicit}) {
    const SchemeSpec spec{RL, R, R, 1.5, 1.0, 16};
    const auto config = config_for(spec, method, stability_limit(1.5, 1.0, spec.spacing()) / 2,
                                   0.01, {0.0, 0.005, 0.01});
    const auto series = run_simulation(config, GridFunction(16));
    CHECK(series.initial == "custom");
    REQUIRE(series.snapshots.size() == 3);
    for (const auto& s : series.snapshots) CHECK(s == GridFunction(16));
    for (double m : series.mass_trace) CHECK(m == 0.0);
  }
}

TEST_CASE("snapshots land on the first step at or after the requested time") {
  const auto config =
      config_for({RL, R, R, 1.5, 1.0, 16}, Method::Implicit, 0.03, 0.1, {0.0, 0.05, 0.06, 0.1});
  const auto series = run_simulation(config);
  CHECK(series.initial == "tent");
  CHECK(series.requested_times == config.snapshot_times);
  REQUIRE(series.times.size() == 4);
  CHECK(series.times[0] == 0.0);
  CHECK(std::abs(series.times[1] - 0.06) <= 1e-15);
  CHECK(std::abs(series.times[2] - 0.06) <= 1e-15);
  CHECK(std::abs(series.times[3] - 0.12) <= 1e-15);
  CHECK(series.step_mass.size() == config.step_count() + 1);
}

TEST_CASE("reflecting runs conserve mass with the figure protocol") {
  for (auto form : {RL, PS}) {
    const auto config = config_for({form, R, R, 1.5, 1.0, 1000}, Method::Implicit, 0.01, 0.5,
                                   {0.0, 0.05, 0.1, 0.5});
    const auto series = run_simulation(config);
    REQUIRE(series.mass_trace.size() == 4);
    for (double m : series.mass_trace) CHECK(std::abs(m - series.mass_trace[0]) <= 1e-9);
    CHECK(std::abs(series.mass_trace[0] - 1.0) <= 1e-3);
  }
}

TEST_CASE("absorbing runs lose mass into the ledger") {
  const auto config = config_for({RL, A, A, 1.5, 1.0, 1000}, Method::Implicit, 0.01, 0.5,
                                 {0.0, 0.05, 0.1, 0.5});
  const auto series = run_simulation(config);
  REQUIRE(series.mass_trace.size() == 4);
  for (std::size_t k = 1; k < 4; ++k) {
    CHECK(series.mass_trace[k] < series.mass_trace[k - 1]);
    CHECK(series.absorbed_cumulative[k] > series.absorbed_cumulative[k - 1]);
  }
  // The slowest absorbing mode decays at a rate near 5 per unit time.
  CHECK(series.mass_trace.back() < 0.2 * series.mass_trace.front());
}

TEST_CASE("ledger closes for every RL and PS combination, both methods") {
  const std::size_t n = 64;
  const double limit = stability_limit(1.5, 1.0, 1.0 / n);
  for (auto form : {RL, PS})
    for (auto l : {A, R})
      for (auto r : {A, R})
        for (auto method : {Method::Explicit, Method::Implicit}) {
          const double dt = method == Method::Explicit ? limit / 2 : 1e-3;
          const auto series =
              run_simulation(config_for({form, l, r, 1.5, 1.0, n}, method, dt, 200 * dt, {0.0}));
          for (std::size_t k = 0; k < series.step_mass.size(); ++k) {
            CHECK(std::abs(series.step_mass[k] + series.step_absorbed[k] - series.step_mass[0]) <=
                  1e-9);
          }
        }
}

TEST_CASE("mass is booked when absorbing nodes are pinned at the start") {
  const auto config = config_for({RL, A, A, 1.5, 1.0, 4}, Method::Implicit, 1e-3, 1e-2, {0.0});
  const auto series = run_simulation(config, GridFunction(std::vector<double>(5, 1.0)));
  CHECK(series.snapshots[0][0] == 0.0);
  CHECK(series.snapshots[0][4] == 0.0);
  CHECK(std::abs(series.mass_trace[0] - 0.75) <= 1e-15);
}

TEST_CASE("positivity under the explicit step condition") {
  const std::size_t n = 128;
  const double dt = stability_limit(1.5, 1.0, 1.0 / n) / 2;
  for (auto form : {RL, PS})
    for (auto l : {A, R})
      for (auto r : {A, R}) {
        const auto series =
            run_simulation(config_for({form, l, r, 1.5, 1.0, n}, Method::Explicit, dt, 1000 * dt,
                                      {0.0, 500 * dt, 1000 * dt}));
        CHECK(negativity_scan(series).min_value >= -1e-12);
      }
}

TEST_CASE("left-absorbing PS and RL runs coincide") {
  for (auto right : {A, R})
    for (auto method : {Method::Explicit, Method::Implicit}) {
      const std::size_t n = 128;
      const double dt = method == Method::Explicit ? stability_limit(1.5, 1.0, 1.0 / n) / 2 : 1e-3;
      const std::vector<double> snaps{0.0, 100 * dt, 300 * dt};
      const auto rl = run_simulation(config_for({RL, A, right, 1.5, 1.0, n}, method, dt, 300 * dt, snaps));
      const auto ps = run_simulation(config_for({PS, A, right, 1.5, 1.0, n}, method, dt, 300 * dt, snaps));
      REQUIRE(rl.snapshots.size() == ps.snapshots.size());
      for (std::size_t k = 0; k < rl.snapshots.size(); ++k)
        CHECK(max_diff(rl.snapshots[k], ps.snapshots[k]) <= 1e-12);
    }
}

TEST_CASE("explicit and implicit Euler agree to first order in dt") {
  const SchemeSpec spec{RL, R, A, 1.5, 1.0, 64};
  const double limit = stability_limit(1.5, 1.0, spec.spacing());
  const double t_end = 400 * limit;
  std::vector<double> gaps;
  for (double dt : {limit / 10, limit / 20, limit / 40}) {
    const auto e = run_simulation(config_for(spec, Method::Explicit, dt, t_end, {t_end}));
    const auto i = run_simulation(config_for(spec, Method::Implicit, dt, t_end, {t_end}));
    GridFunction diff(spec.n);
    for (std::size_t j = 0; j <= spec.n; ++j) diff[j] = e.snapshots[0][j] - i.snapshots[0][j];
    gaps.push_back(l1_norm(diff));
  }
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    const double order = std::log2(gaps[k - 1] / gaps[k]);
    CHECK(order > 0.8);
    CHECK(order < 1.2);
  }
}

TEST_CASE("the Caputo form loses positivity") {
  const auto config = [] {
    SolverConfig c;
    c.spec = {CA, A, A, 1.5, 1.0, 256};
    c.dt = 1e-3;
    c.t_end = 0.2;
    c.snapshot_times = {0.0, 0.01, 0.04, 0.2};
    c.initial = InitialCondition::sine_bump();
    return c;
  }();
  const auto series = run_simulation(config);
  CHECK(negativity_scan(series).min_value < 0.0);
}
