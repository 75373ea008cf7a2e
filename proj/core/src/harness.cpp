#include "aaoreg/harness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace aaoreg {

double ExperimentSpec::tau_sq_for(std::size_t row) const {
  if (tau_sqs.size() == 1) return tau_sqs.front();
  return tau_sqs.at(row);
}

void ExperimentSpec::validate() const {
  if (!(noise_level >= 0.0)) throw std::invalid_argument("experiment: noise_level must be non-negative");
  if (n_interior < 2) throw std::invalid_argument("experiment: n_interior must be at least 2");
  if (jobs < 1) throw std::invalid_argument("experiment: jobs must be at least 1");
  if (!xis.empty() && tau_sqs.size() != 1 && tau_sqs.size() != xis.size()) {
    throw std::invalid_argument("experiment: need one tau_sq per xi or a single tau_sq");
  }
  for (double t : tau_sqs) {
    if (!(t > 1.0)) throw std::invalid_argument("experiment: tau_sq must exceed 1");
  }
  for (const auto& cfg : solver_matrix) cfg.validate();
}

namespace {

SolverConfig paired(Paradigm paradigm, Formulation formulation) {
  SolverConfig cfg;
  cfg.paradigm = paradigm;
  cfg.formulation = formulation;
  return cfg;
}

}  // namespace

ExperimentSpec table1_spec() {
  ExperimentSpec spec;
  spec.xis = {0.0, 10.0, 100.0, 1000.0, -0.5, -1.0, -10.0, -100.0, -1000.0};
  spec.tau_sqs = {4.0, 20.0, 20.0, 20.0, 4.0, 4.0, 4.0, 4.0, 4.0};
  spec.solver_matrix = {paired(Paradigm::irgnm, Formulation::aao), paired(Paradigm::irgnm, Formulation::reduced)};
  return spec;
}

ExperimentSpec table2_spec() {
  ExperimentSpec spec;
  spec.xis = {0.5, 5.0, 10.0, -0.5, -1.0};
  spec.tau_sqs = {4.0};
  for (auto f : {Formulation::aao, Formulation::reduced}) {
    SolverConfig cfg = paired(Paradigm::landweber, f);
    cfg.max_outer = 2000000;
    cfg.trace_stride = 1000;
    spec.solver_matrix.push_back(cfg);
  }
  return spec;
}

Synthesized synthesize_data(const ExperimentSpec& spec, double xi) {
  const Grid1D grid(spec.n_interior);
  const TruthSpec& t = spec.truth;
  ProblemInstance p = ProblemInstance::model(grid, xi);
  p.b_true = GridFunction::sample(
      grid, [&](double s) { return t.amplitude * (std::sin(std::numbers::pi * s) + t.linear * s); });

  StateResult state = solve_state(p, p.b_true, GridFunction(grid), 1e-10, 200);
  if (auto* sol = std::get_if<StateSolution>(&state)) {
    p.u_true = std::move(sol->u);
  } else {
    // The state solver cannot follow this b; build the pair from the state.
    p.manufactured = true;
    p.u_true = GridFunction::sample(
        grid, [&](double s) { return t.manufactured_amplitude * std::sin(std::numbers::pi * s); });
    p.b_true = residual_A(p, GridFunction(grid), p.u_true);
  }

  GridFunction noise(grid);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < grid.size(); ++i) noise[i] = gauss(rng);
  const double raw = norm(noise);
  noise *= raw > 0.0 ? spec.noise_level * norm(p.u_true) / raw : 0.0;

  DataPair d = DataPair::observed(p.u_true + noise, norm(noise));
  return Synthesized{std::move(p), std::move(d)};
}

CellResult run_cell(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg, bool record_timing) {
  CellResult cell;
  RunTrace trace = run_solver(p, d, cfg);
  cell.stop_reason = trace.stop_reason;
  if (trace.failed()) return cell;
  cell.iterations = trace.k_star;
  cell.cpu_s = record_timing ? std::round(trace.wall_time_s * 100.0) / 100.0 : 0.0;
  cell.relerr = norm(trace.x_final - p.b_true) / norm(p.b_true);
  cell.b_final = std::move(trace.x_final);
  return cell;
}

std::vector<ReportRow> run_table(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<ReportRow> rows;
  const SolverConfig* aao_cfg = nullptr;
  const SolverConfig* red_cfg = nullptr;
  for (const auto& cfg : spec.solver_matrix) {
    if (cfg.formulation == Formulation::aao && !aao_cfg) aao_cfg = &cfg;
    if (cfg.formulation == Formulation::reduced && !red_cfg) red_cfg = &cfg;
  }
  if (!aao_cfg && !red_cfg) return rows;

  std::vector<Synthesized> data;
  rows.resize(spec.xis.size());
  for (std::size_t i = 0; i < spec.xis.size(); ++i) {
    data.push_back(synthesize_data(spec, spec.xis[i]));
    rows[i].xi = spec.xis[i];
    rows[i].tau_sq = spec.tau_sq_for(i);
    rows[i].b_true = data[i].problem.b_true;
  }

  // cells: (row, formulation)
  std::vector<std::pair<std::size_t, const SolverConfig*>> cells;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (aao_cfg) cells.emplace_back(i, aao_cfg);
    if (red_cfg) cells.emplace_back(i, red_cfg);
  }
  std::vector<CellResult> results(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      const auto [row, base] = cells[c];
      SolverConfig cfg = *base;
      cfg.tau_sq = rows[row].tau_sq;
      try {
        results[c] = run_cell(data[row].problem, data[row].data, cfg, spec.record_timing);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(spec.jobs, cells.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& row = rows[cells[c].first];
    (cells[c].second->formulation == Formulation::aao ? row.aao : row.red) = std::move(results[c]);
  }
  return rows;
}

namespace {

std::string field(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "-"; }
std::string cpu_field(const std::optional<double>& v) { return v ? fmt::format("{:.2f}", *v) : "-"; }
std::string real_field(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : "-"; }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> parse_real(const std::string& s) {
  if (s == "-") return std::nullopt;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

std::optional<std::size_t> parse_count(const std::string& s) {
  if (s == "-") return std::nullopt;
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad count '" + s + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

void emit_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", r.xi, r.tau_sq, field(r.aao.iterations),
                       field(r.red.iterations), cpu_field(r.aao.cpu_s), cpu_field(r.red.cpu_s),
                       real_field(r.aao.relerr), real_field(r.red.relerr));
  }
}

void emit_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw HarnessIoError("cannot open '" + path.string() + "' for writing");
  emit_csv(rows, out);
  if (!out) throw HarnessIoError("write to '" + path.string() + "' failed");
}

std::vector<ReportRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("CSV: unexpected header");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw std::invalid_argument("CSV: expected 8 fields in '" + line + "'");
    ReportRow r;
    r.xi = std::stod(f[0]);
    r.tau_sq = std::stod(f[1]);
    r.aao.iterations = parse_count(f[2]);
    r.red.iterations = parse_count(f[3]);
    r.aao.cpu_s = parse_real(f[4]);
    r.red.cpu_s = parse_real(f[5]);
    r.aao.relerr = parse_real(f[6]);
    r.red.relerr = parse_real(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ReportRow> parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HarnessIoError("cannot open '" + path.string() + "' for reading");
  return parse_csv(in);
}

void emit_plot_data(const ReportRow& row, const Grid1D& grid, std::ostream& out) {
  const auto series = [&](const char* name, const std::optional<GridFunction>& b, bool first) {
    if (!first) out << "\n\n";
    out << "# " << name << " xi=" << fmt::format("{}", row.xi) << (b ? "" : " (no result)") << '\n';
    if (!b) return;
    for (std::size_t i = 0; i < grid.size(); ++i) out << fmt::format("{} {}\n", grid.node(i), (*b)[i]);
  };
  series("b_true", row.b_true, true);
  series("b_aao", row.aao.b_final, false);
  series("b_red", row.red.b_final, false);
}

void emit_plot_data(const ReportRow& row, const Grid1D& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw HarnessIoError("cannot open '" + path.string() + "' for writing");
  emit_plot_data(row, grid, out);
  if (!out) throw HarnessIoError("write to '" + path.string() + "' failed");
}

}  // namespace aaoreg
