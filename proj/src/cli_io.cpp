#include "fracdiff/cli_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracdiff/errors.hpp"
#include "fracdiff/verify.hpp"

namespace fracdiff {

namespace {

using nlohmann::json;

// Thrown by parse_args for --help; cli_main prints the text and exits 0.
class HelpRequested : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw UsageError("--" + key + " expects a number, got '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("--" + key + " expects a nonnegative integer, got '" + text + "'");
  }
  return v;
}

// Reads a scalar that may come from JSON as a number or a string.
double real_field(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_real(key, v.get<std::string>());
  throw UsageError("field '" + key + "' must be a number");
}

std::size_t count_field(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::size_t>();
  if (v.is_string()) return parse_count(key, v.get<std::string>());
  throw UsageError("field '" + key + "' must be a nonnegative integer");
}

std::string string_field(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_string()) throw UsageError("field '" + key + "' must be a string");
  return v.get<std::string>();
}

void require(const json& doc, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (!doc.contains(key)) throw UsageError(std::string("missing required --") + key);
  }
}

DerivativeForm parse_form(const std::string& text) {
  if (text == "rl") return DerivativeForm::RiemannLiouville;
  if (text == "ps") return DerivativeForm::PatieSimon;
  if (text == "caputo") return DerivativeForm::Caputo;
  throw UsageError("--deriv must be rl, ps or caputo, got '" + text + "'");
}

BoundaryCondition parse_bc(const std::string& key, const std::string& text) {
  if (text == "absorbing") return BoundaryCondition::Absorbing;
  if (text == "reflecting") return BoundaryCondition::Reflecting;
  throw UsageError("--" + key + " must be absorbing or reflecting, got '" + text + "'");
}

Method parse_method(const std::string& text) {
  if (text == "explicit") return Method::Explicit;
  if (text == "implicit") return Method::Implicit;
  throw UsageError("--method must be explicit or implicit, got '" + text + "'");
}

InitialCondition parse_ic(const std::string& text) {
  if (text == "tent") return InitialCondition::tent();
  if (text == "bump") return InitialCondition::sine_bump();
  if (text == "uniform") return InitialCondition::uniform();
  if (text.starts_with("file:") && text.size() > 5) {
    return InitialCondition::from_file(text.substr(5));
  }
  throw UsageError("--ic must be tent, bump, uniform or file:PATH, got '" + text + "'");
}

std::vector<double> parse_times(const json& doc) {
  const auto& v = doc.at("snapshots");
  std::vector<double> times;
  if (v.is_array()) {
    for (const auto& t : v) {
      if (!t.is_number()) throw UsageError("snapshots must be numbers");
      times.push_back(t.get<double>());
    }
    return times;
  }
  if (!v.is_string()) throw UsageError("snapshots must be a list or a comma-separated string");
  std::stringstream ss(v.get<std::string>());
  std::string item;
  while (std::getline(ss, item, ',')) times.push_back(parse_real("snapshots", item));
  if (times.empty()) throw UsageError("--snapshots is empty");
  return times;
}

SchemeSpec spec_from(const json& doc) {
  require(doc, {"alpha", "n", "deriv", "left", "right"});
  SchemeSpec spec;
  spec.alpha = real_field(doc, "alpha");
  spec.diffusivity = doc.contains("c") ? real_field(doc, "c") : 1.0;
  spec.n = count_field(doc, "n");
  spec.form = parse_form(string_field(doc, "deriv"));
  spec.left = parse_bc("left", string_field(doc, "left"));
  spec.right = parse_bc("right", string_field(doc, "right"));
  try {
    spec.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return spec;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  try {
    json doc = json::parse(in);
    if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
    // Accept the flag spelling "t-end" as well as "t_end".
    if (doc.contains("t-end") && !doc.contains("t_end")) doc["t_end"] = doc["t-end"];
    return doc;
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
}

// Flag values collected as raw strings so that JSON fields can be overridden
// only by flags that actually appeared.
struct FlagSet {
  std::vector<std::pair<std::string, std::string>> keys;  // json key, flag name
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& key, const std::string& flag,
           const std::string& help) {
    keys.emplace_back(key, flag);
    app->add_option("--" + flag, values[key], help);
  }

  void merge_into(json& doc, CLI::App* app) const {
    for (const auto& [key, flag] : keys) {
      if (app->count("--" + flag) > 0) doc[key] = values.at(key);
    }
  }
};

void add_spec_flags(FlagSet& flags, CLI::App* app) {
  flags.add(app, "alpha", "alpha", "fractional order in (1,2)");
  flags.add(app, "c", "c", "diffusivity C > 0 (default 1)");
  flags.add(app, "n", "n", "number of grid intervals, h = 1/n");
  flags.add(app, "deriv", "deriv", "rl | ps | caputo");
  flags.add(app, "left", "left", "absorbing | reflecting");
  flags.add(app, "right", "right", "absorbing | reflecting");
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

void check_written(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError("failed writing " + path.string());
}

std::string scientific(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.16e", v);
  return buf.data();
}

std::string_view kind_name(SteadyStateReference::Kind kind) {
  switch (kind) {
    case SteadyStateReference::Kind::PowerLaw: return "power_law";
    case SteadyStateReference::Kind::Constant: return "constant";
    case SteadyStateReference::Kind::Zero: return "zero";
  }
  return "?";
}

const std::vector<FigureProtocol>& catalogue() {
  using BC = BoundaryCondition;
  using DF = DerivativeForm;
  using IC = InitialCondition::Kind;
  static const std::vector<double> standard{0.0, 0.05, 0.1, 0.5};
  static const std::vector<FigureProtocol> figures{
      {1, "Riemann-Liouville, absorbing both sides, tent", DF::RiemannLiouville, BC::Absorbing,
       BC::Absorbing, IC::Tent, standard},
      {2, "Riemann-Liouville, reflecting both sides, tent", DF::RiemannLiouville, BC::Reflecting,
       BC::Reflecting, IC::Tent, standard},
      {3, "Riemann-Liouville, reflecting left / absorbing right, tent", DF::RiemannLiouville,
       BC::Reflecting, BC::Absorbing, IC::Tent, standard},
      {4, "Riemann-Liouville, absorbing left / reflecting right, tent", DF::RiemannLiouville,
       BC::Absorbing, BC::Reflecting, IC::Tent, standard},
      {5, "Caputo flux (Patie-Simon), reflecting both sides, tent", DF::PatieSimon,
       BC::Reflecting, BC::Reflecting, IC::Tent, standard},
      {6, "Caputo flux (Patie-Simon), reflecting left / absorbing right, tent", DF::PatieSimon,
       BC::Reflecting, BC::Absorbing, IC::Tent, standard},
      {7, "Caputo derivative, absorbing both sides, sine bump (loses positivity)", DF::Caputo,
       BC::Absorbing, BC::Absorbing, IC::SineBump, {0.0, 0.01, 0.04, 0.2}},
  };
  return figures;
}

CliCommand parse_solve(CLI::App* sub, const FlagSet& flags, const std::string& config_path,
                       bool allow_unstable) {
  json doc = config_path.empty() ? json::object() : load_config(config_path);
  flags.merge_into(doc, sub);
  require(doc, {"dt", "t_end", "ic", "out"});

  SolveCommand cmd;
  SolverConfig& cfg = cmd.config;
  cfg.spec = spec_from(doc);
  cfg.dt = real_field(doc, "dt");
  cfg.t_end = real_field(doc, "t_end");
  cfg.method = doc.contains("method") ? parse_method(string_field(doc, "method"))
                                      : Method::Implicit;
  cfg.initial = parse_ic(string_field(doc, "ic"));
  cfg.snapshot_times =
      doc.contains("snapshots") ? parse_times(doc) : std::vector<double>{0.0, cfg.t_end};
  cfg.allow_unstable = allow_unstable;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  cmd.out = string_field(doc, "out");
  if (doc.contains("report")) cmd.report = string_field(doc, "report");
  return cmd;
}

}  // namespace

// ---------------------------------------------------------------------------
// Argument parsing

CliCommand parse_args(std::span<const std::string> args) {
  CLI::App app{"Fractional diffusion on [0,1] with absorbing/reflecting boundaries", "fracdiff"};
  app.require_subcommand(1);

  FlagSet solve_flags;
  std::string config_path;
  bool allow_unstable = false;
  auto* solve = app.add_subcommand("solve", "run a simulation and write a t,x,u CSV");
  add_spec_flags(solve_flags, solve);
  solve_flags.add(solve, "dt", "dt", "time step");
  solve_flags.add(solve, "t_end", "t-end", "final time");
  solve_flags.add(solve, "ic", "ic", "tent | bump | uniform | file:PATH");
  solve_flags.add(solve, "method", "method", "explicit | implicit (default implicit)");
  solve_flags.add(solve, "snapshots", "snapshots", "comma-separated snapshot times");
  solve_flags.add(solve, "out", "out", "output CSV path");
  solve_flags.add(solve, "report", "report", "optional diagnostics CSV path");
  solve->add_option("--config", config_path, "JSON file with the same fields; flags win");
  solve->add_flag("--allow-unstable", allow_unstable,
                  "allow an explicit dt above the stability limit");

  FlagSet matrix_flags;
  auto* matrix = app.add_subcommand("matrix", "write the iteration matrix B as CSV");
  add_spec_flags(matrix_flags, matrix);
  matrix_flags.add(matrix, "out", "out", "output CSV path");

  std::string order_text, m_text, weights_out;
  auto* weights = app.add_subcommand("weights", "write Grunwald weights g_0..g_m as CSV");
  weights->add_option("--order", order_text, "weight order")->required();
  weights->add_option("--m", m_text, "largest index")->required();
  weights->add_option("--out", weights_out, "output CSV path")->required();

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("suite", suite, "identities | matrices | conservation | positivity | "
                                     "steady | decay | caputo-negativity | all")
      ->required();

  FigureCommand figure_cmd;
  std::string figure_id, figure_out, figure_n, figure_dt, figure_method;
  auto* figure = app.add_subcommand("figure", "reproduce one of the catalogued figure runs");
  figure->add_option("id", figure_id, "figure id (see --list)");
  figure->add_flag("--list", figure_cmd.list, "print the id to protocol mapping");
  figure->add_option("--out", figure_out, "output CSV path");
  figure->add_option("--n", figure_n, "grid intervals (default 1000)");
  figure->add_option("--dt", figure_dt, "time step (default 1e-3)");
  figure->add_option("--method", figure_method, "explicit | implicit (default implicit)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    std::string reason = e.what();
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    throw UsageError(reason);
  }

  if (solve->parsed()) return parse_solve(solve, solve_flags, config_path, allow_unstable);

  if (matrix->parsed()) {
    json doc = json::object();
    matrix_flags.merge_into(doc, matrix);
    require(doc, {"out"});
    return MatrixCommand{spec_from(doc), string_field(doc, "out")};
  }

  if (weights->parsed()) {
    WeightsCommand cmd;
    cmd.order = parse_real("order", order_text);
    cmd.m = parse_count("m", m_text);
    cmd.out = weights_out;
    return cmd;
  }

  if (verify->parsed()) {
    if (!is_verify_suite(suite)) throw UsageError("unknown verify suite '" + suite + "'");
    return VerifyCommand{suite};
  }

  // figure
  if (figure_cmd.list) return figure_cmd;
  if (figure_id.empty()) throw UsageError("figure needs an id or --list");
  const auto id = parse_count("id", figure_id);
  const auto& figs = catalogue();
  if (id < 1 || id > figs.size()) {
    throw UsageError("unknown figure id " + figure_id + " (valid: 1-" +
                     std::to_string(figs.size()) + ")");
  }
  if (figure_out.empty()) throw UsageError("figure needs --out");
  figure_cmd.id = static_cast<int>(id);
  figure_cmd.out = figure_out;
  if (!figure_n.empty()) figure_cmd.n = parse_count("n", figure_n);
  if (!figure_dt.empty()) figure_cmd.dt = parse_real("dt", figure_dt);
  if (!figure_method.empty()) figure_cmd.method = parse_method(figure_method);
  try {
    figure_config(figure_cmd.id, figure_cmd.n, figure_cmd.dt, figure_cmd.method).validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return figure_cmd;
}

// ---------------------------------------------------------------------------
// Formats

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf.data(), ptr);
}

void write_timeseries_csv(const TimeSeries& series, std::ostream& os) {
  os << "t,x,u\n";
  for (std::size_t k = 0; k < series.snapshots.size(); ++k) {
    const auto& u = series.snapshots[k];
    const std::string t = format_double(series.times[k]);
    for (std::size_t j = 0; j < u.size(); ++j) {
      os << t << ',' << format_double(u.node(j)) << ',' << format_double(u[j]) << '\n';
    }
  }
}

void emit_timeseries_csv(const TimeSeries& series, const std::filesystem::path& path) {
  {
    auto os = open_output(path);
    write_timeseries_csv(series, os);
    check_written(os, path);
  }
  const SchemeSpec& spec = series.spec;
  json meta;
  meta["alpha"] = spec.alpha;
  meta["c"] = spec.diffusivity;
  meta["n"] = spec.n;
  meta["dt"] = series.dt;
  meta["t_end"] = series.t_end;
  meta["deriv"] = to_string(spec.form);
  meta["left"] = to_string(spec.left);
  meta["right"] = to_string(spec.right);
  meta["ic"] = series.initial;
  meta["method"] = to_string(series.method);
  meta["mass_trace"] = series.mass_trace;
  meta["absorbed_cumulative"] = series.absorbed_cumulative;
  meta["actual_snapshot_times"] = series.times;
  meta["requested_snapshot_times"] = series.requested_times;

  auto meta_path = path;
  meta_path += ".meta.json";
  auto os = open_output(meta_path);
  os << meta.dump(2) << '\n';
  check_written(os, meta_path);
}

CsvSnapshots read_timeseries_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,x,u") throw IoError("expected header t,x,u");
  CsvSnapshots out;
  std::vector<double> current;
  auto flush = [&] {
    if (!current.empty()) out.snapshots.emplace_back(std::move(current));
    current = {};
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<double, 3> row{};
    std::size_t start = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      const auto stop = c < 2 ? line.find(',', start) : line.size();
      if (stop == std::string::npos) throw IoError("short CSV row: " + line);
      const auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + stop, row[c]);
      if (ec != std::errc() || ptr != line.data() + stop) throw IoError("bad CSV row: " + line);
      start = stop + 1;
    }
    if (row[1] == 0.0) {
      flush();
      out.times.push_back(row[0]);
    }
    current.push_back(row[2]);
  }
  flush();
  if (out.times.size() != out.snapshots.size()) throw IoError("CSV does not start at x = 0");
  return out;
}

void write_matrix_csv(const IterationMatrix& b, std::ostream& os) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (j > 0) os << ',';
      os << scientific(b(i, j));
    }
    os << '\n';
  }
}

void write_weights_csv(const GrunwaldWeights& weights, std::ostream& os) {
  os << "i,g\n";
  for (std::size_t i = 0; i <= weights.last_index(); ++i) {
    os << i << ',' << scientific(weights[i]) << '\n';
  }
}

void write_report_text(const DiagnosticsReport& report, std::ostream& os) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("n/a");
  };
  os << "snapshots=" << report.times.size() << '\n';
  if (!report.mass_trace.empty()) {
    os << "mass_initial=" << format_double(report.mass_trace.front()) << '\n';
    os << "mass_final=" << format_double(report.mass_trace.back()) << '\n';
    os << "absorbed_final=" << format_double(report.absorbed_cumulative.back()) << '\n';
  }
  os << "min_value=" << format_double(report.minimum.min_value) << '\n';
  os << "min_time_index=" << report.minimum.time_index << '\n';
  os << "min_node_index=" << report.minimum.node_index << '\n';
  os << "steady_state_kind=" << kind_name(report.steady_kind) << '\n';
  if (!report.steady_state_distance.empty()) {
    os << "steady_state_distance_final=" << format_double(report.steady_state_distance.back())
       << '\n';
  }
  os << "decay_rate=" << opt(report.decay_rate) << '\n';
  if (report.boundary_flux) {
    os << "boundary_flux_left=" << format_double(report.boundary_flux->left) << '\n';
    os << "boundary_flux_right=" << format_double(report.boundary_flux->right) << '\n';
  } else {
    os << "boundary_flux_left=n/a\nboundary_flux_right=n/a\n";
  }
  os << "convergence_order=" << opt(report.convergence_order) << '\n';
}

void write_report_csv(const DiagnosticsReport& report, std::ostream& os) {
  os << "t,mass,absorbed,steady_state_distance\n";
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    os << format_double(report.times[k]) << ',' << format_double(report.mass_trace[k]) << ','
       << format_double(report.absorbed_cumulative[k]) << ','
       << format_double(report.steady_state_distance[k]) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Figures

std::span<const FigureProtocol> figure_catalogue() { return catalogue(); }

SolverConfig figure_config(int id, std::size_t n, double dt, Method method) {
  const auto& figs = catalogue();
  const auto it = std::find_if(figs.begin(), figs.end(),
                               [id](const FigureProtocol& f) { return f.id == id; });
  if (it == figs.end()) throw InvalidSpec("unknown figure id " + std::to_string(id));

  SolverConfig cfg;
  cfg.spec = {it->form, it->left, it->right, 1.5, 1.0, n};
  cfg.dt = dt;
  cfg.method = method;
  cfg.snapshot_times = it->snapshot_times;
  cfg.t_end = it->snapshot_times.back();
  switch (it->initial) {
    case InitialCondition::Kind::SineBump: cfg.initial = InitialCondition::sine_bump(); break;
    case InitialCondition::Kind::Uniform: cfg.initial = InitialCondition::uniform(); break;
    default: cfg.initial = InitialCondition::tent(); break;
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Execution

int run_command(const CliCommand& command, std::ostream& out, std::ostream& err) {
  return std::visit(
      [&](const auto& cmd) -> int {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, SolveCommand>) {
          const auto series = run_simulation(cmd.config);
          emit_timeseries_csv(series, cmd.out);
          const auto report = make_report(series);
          write_report_text(report, out);
          if (cmd.report) {
            auto os = open_output(*cmd.report);
            write_report_csv(report, os);
            check_written(os, *cmd.report);
          }
          return 0;
        } else if constexpr (std::is_same_v<T, MatrixCommand>) {
          auto os = open_output(cmd.out);
          write_matrix_csv(build_matrix(cmd.spec), os);
          check_written(os, cmd.out);
          return 0;
        } else if constexpr (std::is_same_v<T, WeightsCommand>) {
          auto os = open_output(cmd.out);
          write_weights_csv(grunwald_weights(cmd.order, cmd.m), os);
          check_written(os, cmd.out);
          return 0;
        } else if constexpr (std::is_same_v<T, VerifyCommand>) {
          return run_verify(cmd.suite, out);
        } else {
          if (cmd.list) {
            for (const auto& f : figure_catalogue()) {
              out << f.id << ": " << to_string(f.form) << ' ' << to_string(f.left) << '/'
                  << to_string(f.right) << ", ic="
                  << (f.initial == InitialCondition::Kind::SineBump ? "bump" : "tent")
                  << ", snapshots=";
              for (std::size_t k = 0; k < f.snapshot_times.size(); ++k) {
                out << (k ? "," : "") << format_double(f.snapshot_times[k]);
              }
              out << "  (" << f.caption << ")\n";
            }
            return 0;
          }
          const auto series = run_simulation(figure_config(cmd.id, cmd.n, cmd.dt, cmd.method));
          emit_timeseries_csv(series, cmd.out);
          err << "figure " << cmd.id << " written to " << cmd.out.string() << '\n';
          return 0;
        }
      },
      command);
}

int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  try {
    return run_command(parse_args(args), out, err);
  } catch (const HelpRequested& help) {
    out << help.what();
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fracdiff
