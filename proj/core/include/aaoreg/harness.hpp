#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aaoreg/solvers.hpp"

namespace aaoreg {

/// I/O failure with the offending path in the message.
class HarnessIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TruthSpec {
  // b(s) = amplitude * (sin(pi s) + linear * s)
  double amplitude = 15.0;
  double linear = 0.1;
  // state used when b cannot be followed by the state solver: amplitude * sin(pi s)
  double manufactured_amplitude = 2.5;
};

struct ExperimentSpec {
  std::vector<double> xis;
  std::vector<double> tau_sqs;  // one per xi, or a single value for all
  std::size_t n_interior = 99;
  TruthSpec truth;
  double noise_level = 0.01;
  std::uint64_t seed = 1;
  std::vector<SolverConfig> solver_matrix;
  std::size_t jobs = 1;
  bool record_timing = true;

  double tau_sq_for(std::size_t row) const;
  void validate() const;
};

/// IRGNM comparison defaults, both formulations, nine nonlinearity strengths.
ExperimentSpec table1_spec();
/// Landweber comparison defaults, both formulations, cap 2e6.
ExperimentSpec table2_spec();

struct Synthesized {
  ProblemInstance problem;
  DataPair data;
};

/// Ground truth and noisy data for one xi. The noise direction depends only
/// on the seed, so every xi of one spec sees the same realization.
Synthesized synthesize_data(const ExperimentSpec& spec, double xi);

/// Outcome of one solver run inside a table; empty numbers mean the run failed.
struct CellResult {
  std::optional<std::size_t> iterations;
  std::optional<double> cpu_s;
  std::optional<double> relerr;
  StopReason stop_reason = StopReason::iteration_cap;
  std::optional<GridFunction> b_final;
};

struct ReportRow {
  double xi = 0.0;
  double tau_sq = 0.0;
  CellResult aao;
  CellResult red;
  std::optional<GridFunction> b_true;
};

/// Runs every xi of the spec with the aao and reduced configs of its solver
/// matrix. Cells run on spec.jobs threads; rows keep spec order.
std::vector<ReportRow> run_table(const ExperimentSpec& spec);

/// One run through the same path run_table uses.
CellResult run_cell(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg, bool record_timing);

inline constexpr const char* kCsvHeader = "xi,tau_sq,it_aao,it_red,cpu_aao_s,cpu_red_s,relerr_aao,relerr_red";

void emit_csv(const std::vector<ReportRow>& rows, std::ostream& out);
void emit_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path);
std::vector<ReportRow> parse_csv(std::istream& in);
std::vector<ReportRow> parse_csv(const std::filesystem::path& path);

/// Whitespace-separated (s_i, b_i) series for b_true, b_aao and b_red,
/// each introduced by a '#' line and separated by blank lines. A failed
/// run keeps its header and contributes no points.
void emit_plot_data(const ReportRow& row, const Grid1D& grid, std::ostream& out);
void emit_plot_data(const ReportRow& row, const Grid1D& grid, const std::filesystem::path& path);

}  // namespace aaoreg
