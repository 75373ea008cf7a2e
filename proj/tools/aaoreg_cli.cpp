#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "aaoreg/diagnostics.hpp"
#include "aaoreg/harness.hpp"
#include "aaoreg/selftest.hpp"
#include "aaoreg/settings.hpp"

namespace fs = std::filesystem;
using namespace aaoreg;

namespace {

constexpr int kValidationError = 1;
constexpr int kRuntimeError = 2;

// Options shared by every subcommand. Explicit flags beat --set, which beats
// the config file.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> xi;
  std::optional<std::string> tau_sq;
  std::optional<std::string> seed;
  std::optional<std::string> method;
  std::optional<std::string> max_outer;
  std::optional<std::string> jobs;
  std::optional<std::string> output_dir;
  bool no_timing = false;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--config", o.config_path, "key = value settings file");
  cmd.add_option("--set", o.sets, "override, key=value (repeatable)");
  cmd.add_option("--xi", o.xi, "nonlinearity strength(s), comma separated");
  cmd.add_option("--tau-sq", o.tau_sq, "discrepancy factor tau^2, one or one per xi");
  cmd.add_option("--seed", o.seed, "noise seed");
  cmd.add_option("--method", o.method, "e.g. irgnm-aao, landweber-reduced (tables: irgnm|landweber|tikhonov)");
  cmd.add_option("--max-outer", o.max_outer, "outer iteration cap");
  cmd.add_option("--jobs", o.jobs, "worker threads for table cells");
  cmd.add_option("--output-dir", o.output_dir, "write CSV and plot data here (default: $AAOREG_OUTPUT_DIR)");
  cmd.add_flag("--no-timing", o.no_timing, "report cpu time as 0 for reproducible output");
}

Settings collect_settings(const CommonOptions& o) {
  Settings s;
  if (!o.config_path.empty()) s = parse_settings_file(o.config_path);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw SettingsError("--set expects key=value, got '" + kv + "'");
    s.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const auto flag = [&](const char* key, const std::optional<std::string>& v) {
    if (v) s.set(key, *v);
  };
  flag("xi", o.xi);
  flag("tau_sq", o.tau_sq);
  flag("seed", o.seed);
  flag("method", o.method);
  flag("max_outer", o.max_outer);
  flag("jobs", o.jobs);
  flag("output_dir", o.output_dir);
  if (o.no_timing) s.set("record_timing", "false");
  return s;
}

std::optional<fs::path> output_dir(const Settings& s) {
  if (auto dir = s.get("output_dir")) return fs::path(*dir);
  if (const char* env = std::getenv("AAOREG_OUTPUT_DIR"); env && *env) return fs::path(env);
  return std::nullopt;
}

fs::path prepared(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw HarnessIoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

Settings without(const Settings& s, std::initializer_list<const char*> drop) {
  Settings out;
  for (const auto& [k, v] : s.entries()) {
    if (std::find_if(drop.begin(), drop.end(), [&](const char* d) { return k == d; }) == drop.end()) out.set(k, v);
  }
  return out;
}

std::string cell_text(const std::optional<double>& v, const char* spec) {
  return v ? fmt::format(fmt::runtime(spec), *v) : "-";
}

int cmd_run(const Settings& s) {
  SolverConfig cfg;
  apply_settings(s, cfg);

  ExperimentSpec spec;
  spec.xis = {0.0};
  spec.tau_sqs = {cfg.tau_sq};
  apply_settings(without(s, {"method", "tau_sq"}), spec);
  if (spec.xis.size() != 1) throw SettingsError("xi: run takes a single value");
  cfg.record_timing = spec.record_timing;

  const double xi = spec.xis.front();
  const Synthesized syn = synthesize_data(spec, xi);
  const CellResult cell = run_cell(syn.problem, syn.data, cfg, spec.record_timing);

  const std::string method = fmt::format("{}-{}", to_string(cfg.paradigm), to_string(cfg.formulation));
  const std::string header = "method,xi,tau_sq,stop_reason,iterations,cpu_s,relerr";
  const std::string row = fmt::format("{},{},{},{},{},{},{}", method, xi, cfg.tau_sq, to_string(cell.stop_reason),
                                      cell.iterations ? std::to_string(*cell.iterations) : "-",
                                      cell_text(cell.cpu_s, "{:.2f}"), cell_text(cell.relerr, "{}"));
  fmt::print("{}\n{}\n", header, row);

  if (auto dir = output_dir(s)) {
    const fs::path out = prepared(*dir);
    std::ofstream csv(out / "run.csv", std::ios::binary);
    if (!csv) throw HarnessIoError("cannot open '" + (out / "run.csv").string() + "' for writing");
    csv << header << '\n' << row << '\n';

    ReportRow plot{xi, cfg.tau_sq, {}, {}, syn.problem.b_true};
    (cfg.formulation == Formulation::aao ? plot.aao : plot.red) = cell;
    emit_plot_data(plot, syn.problem.grid, out / "run_plot.dat");
  }
  return cell.stop_reason == StopReason::singular_operator ? kRuntimeError : 0;
}

int cmd_table(const Settings& s, ExperimentSpec spec, const std::string& name) {
  apply_settings(s, spec);
  const auto rows = run_table(spec);
  emit_csv(rows, std::cout);
  if (auto dir = output_dir(s)) {
    const fs::path out = prepared(*dir);
    emit_csv(rows, out / (name + ".csv"));
    const Grid1D grid(spec.n_interior);
    for (const auto& row : rows) emit_plot_data(row, grid, out / fmt::format("{}_xi_{}.dat", name, row.xi));
  }
  return 0;
}

int cmd_rate(const Settings& s, const std::string& truth, const std::vector<double>& deltas) {
  RateExperiment ex;
  ex.truth = truth == "mismatch" ? RateTruth::endpoint_mismatch : RateTruth::source_smooth;
  apply_settings(s, ex.solver);
  ex.tau_sq = ex.solver.tau_sq;
  ExperimentSpec scratch;
  scratch.n_interior = ex.n_interior;
  scratch.seed = ex.seed;
  apply_settings(without(s, {"method", "tau_sq", "xi"}), scratch);
  ex.n_interior = scratch.n_interior;
  ex.seed = scratch.seed;

  const RateFit fit = fit_rate([&](double delta) { return rate_run(ex, delta); }, deltas);
  fmt::print("delta,error\n");
  for (std::size_t i = 0; i < fit.deltas.size(); ++i) fmt::print("{},{}\n", fit.deltas[i], fit.errors[i]);
  fmt::print("slope,{}\n", fit.slope);
  return 0;
}

int cmd_diag(const Settings& s) {
  ExperimentSpec spec;
  spec.xis = {10.0};
  spec.tau_sqs = {4.0};
  apply_settings(without(s, {"method"}), spec);

  for (double xi : spec.xis) {
    const Synthesized syn = synthesize_data(spec, xi);
    const auto& p = syn.problem;
    const GridFunction zero(p.grid);
    fmt::print("xi {}\n", xi);
    fmt::print("  range gap, true state vs zero start (l2): {}\n", range_invariance_gap(p, p.u_true, zero));
    fmt::print("  range gap, true state vs zero start (h2): {}\n",
               range_invariance_gap(p, p.u_true, zero, StateNorm::h2));
    fmt::print("  range gap, true state vs data (l2):       {}\n",
               range_invariance_gap(p, p.u_true, syn.data.y_obs));
  }

  const ProblemInstance linear = synthesize_data(spec, 0.0).problem;
  const auto report = [&](const char* label, const ProblemInstance& p) {
    const GridFunction zero(p.grid);
    const SourceElements el = source_condition_elements_linear(p, p.b_true, zero, zero);
    fmt::print("source elements, {} (zero priors): |v_obs| {} |v_mod| {} residual {}\n", label, norm(el.v_obs),
               norm(el.v_mod), el.residual);
  };
  report("table truth", linear);
  RateExperiment ex;
  ex.n_interior = spec.n_interior;
  report("smooth rate truth", rate_problem(ex));
  ex.truth = RateTruth::endpoint_mismatch;
  report("endpoint-mismatch truth", rate_problem(ex));
  return 0;
}

int cmd_selftest() {
  bool ok = true;
  for (const auto& c : run_selftest()) {
    fmt::print("{} {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
    ok = ok && c.passed;
  }
  return ok ? 0 : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularization of a semilinear inverse source problem: joint and reduced formulations"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto* run = app.add_subcommand("run", "one solver run; prints the stop reason and error");
  auto* t1 = app.add_subcommand("table1", "IRGNM comparison table as CSV");
  auto* t2 = app.add_subcommand("table2", "Landweber comparison table as CSV");
  auto* rate = app.add_subcommand("rate", "empirical convergence rate on the linear problem");
  auto* diag = app.add_subcommand("diag", "range-invariance gaps and source-condition elements");
  auto* self = app.add_subcommand("selftest", "adjoint, derivative and structural invariant checks");
  for (auto* cmd : {run, t1, t2, rate, diag}) add_common(*cmd, opts);

  std::string truth = "smooth";
  std::vector<double> deltas = {1e-2, 1e-3, 1e-4, 1e-5};
  rate->add_option("--truth", truth, "smooth | mismatch")->check(CLI::IsMember({"smooth", "mismatch"}));
  rate->add_option("--deltas", deltas, "noise levels, strictly decreasing")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kValidationError;
  }

  try {
    if (self->parsed()) return cmd_selftest();
    const Settings s = collect_settings(opts);
    if (run->parsed()) return cmd_run(s);
    if (t1->parsed()) return cmd_table(s, table1_spec(), "table1");
    if (t2->parsed()) return cmd_table(s, table2_spec(), "table2");
    if (rate->parsed()) return cmd_rate(s, truth, deltas);
    if (diag->parsed()) return cmd_diag(s);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kValidationError;
}
