#pragma once

#include "sesop/bench/solvers.hpp"
#include "sesop/problems.hpp"
#include "sesop/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sesop::bench {

const std::vector<std::string>& experiment_names();

struct ExperimentPlan {
  std::string name;  ///< one of experiment_names(), or "run" for a single ad-hoc cell
  std::vector<std::uint64_t> seeds{1};
  std::vector<ProblemSpec> problems;  ///< seed field is replaced by each entry of seeds
  std::vector<SolverSpec> solvers;
  StopCriteria stop;
  bool timing = false;
  /// Iterations of the long-run reference solve for problems without an
  /// analytic optimum (FISTA for l1_ls, SESOP-TN for svm_smooth).
  Index oracle_iterations = 100000;
  /// Axes for the plot tables written next to the traces.
  std::vector<std::string> plot_axes{"iter"};

  std::string to_json() const;
  static ExperimentPlan from_json(const std::string& text);

  bool operator==(const ExperimentPlan&) const = default;
};

/// Default plan of a named experiment; throws listing valid names.
ExperimentPlan make_plan(const std::string& name);

/// Applies --tol: the target on f - f_opt when the plan stops on it,
/// otherwise the stationarity tolerance.
void apply_tolerance(ExperimentPlan& plan, double tol);

struct ReferenceSolution {
  std::optional<double> f_opt;
  std::optional<Vector> x_opt;
  std::string method;
};

/// Analytic optimum when known, else the long-run oracle of the plan.
ReferenceSolution reference_solution(const Problem& problem, Index oracle_iterations);

struct SummaryRow {
  std::string problem;
  std::uint64_t seed = 0;
  std::string solver;
  std::string file;  ///< trace file name relative to the experiment directory
  Status status = Status::running;
  Index iters = 0;
  std::int64_t cum_steps = 0;
  double final_f = 0.0;
  std::optional<double> final_gap;
  std::int64_t matvecs = 0;
  std::optional<std::int64_t> matvecs_to_tol;
  std::optional<std::int64_t> cum_steps_to_tol;
  std::optional<double> final_snr_db;
  std::map<std::string, double> extra;  ///< experiment-specific columns
  std::string error;                    ///< exception text when the run threw
};

struct CellOutput {
  SummaryRow summary;
  Trace trace;
};

struct ExperimentReport {
  ExperimentPlan plan;
  std::filesystem::path directory;
  std::vector<CellOutput> cells;
  std::vector<std::string> files;  ///< every file written, relative to directory
  bool solver_failure = false;
};

/// Index of the first row meeting the plan's tolerance: f_gap <= f_tol when
/// both are present, else stationarity <= grad_tol * max(1, row 0's).
std::optional<std::size_t> first_row_within_tol(const Trace& trace, const StopCriteria& stop);

struct RunSettings {
  std::filesystem::path out_root = "results";
  unsigned jobs = 1;
  bool write_files = true;
};

/// Runs every (problem, seed, solver) cell, then writes one CSV per cell,
/// summary.tsv, plot tables with gnuplot scripts and manifest.json into
/// out_root / plan.name. Cells may run in parallel; results do not depend
/// on scheduling.
ExperimentReport run_experiment(const ExperimentPlan& plan, const RunSettings& settings);

std::string summary_table(const std::vector<CellOutput>& cells);

}  // namespace sesop::bench
