#include "sesop/bench/cli.hpp"

#include "sesop/bench/experiments.hpp"
#include "sesop/bench/plot.hpp"
#include "sesop/text.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sesop::bench {

namespace {

std::string joined(const std::vector<std::string>& v) {
  std::string out;
  for (const std::string& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string default_out() {
  const char* env = std::getenv("BENCH_OUT");
  return env && *env ? env : "results";
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Run SESOP benchmark experiments and write convergence traces.", "sesop-bench"};
  app.set_version_flag("--version", library_version());

  std::string experiment;
  std::string problem_text;
  std::vector<std::string> solver_texts;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = default_out();
  std::optional<std::int64_t> max_matvecs;
  std::optional<double> tol;
  std::optional<Index> oracle_iters;
  std::string plan_file;
  bool timing = false;
  unsigned jobs = 1;

  auto* exp_opt = app.add_option("--experiment", experiment, "Named experiment (see 'list')");
  app.add_option("--problem", problem_text, "Problem spec, e.g. kind=l1_ls,m=200,n=512");
  app.add_option("--solver", solver_texts, "Solver spec, e.g. sesop_tn,lmax=10 (repeatable)");
  app.add_option("--seed", seeds, "Seed(s); repeat or separate with commas")->delimiter(',');
  app.add_option("--out", out_dir, "Output root directory (env BENCH_OUT; default ./results)");
  app.add_option("--max-matvecs", max_matvecs, "Operator application budget per run");
  app.add_option("--tol", tol, "Target on f - f_opt, or stationarity tolerance when f_opt is not used");
  app.add_option("--oracle-iters", oracle_iters, "Iterations of the reference solve");
  app.add_option("--plan", plan_file, "Run a plan saved as JSON (manifest 'plan' object)")
      ->excludes(exp_opt);
  app.add_flag("--timing", timing, "Record wall-clock time per trace row");
  app.add_option("--jobs", jobs, "Cells run in parallel")->check(CLI::PositiveNumber);

  auto* list_cmd = app.add_subcommand("list", "List experiments and solvers");

  auto* plot_cmd = app.add_subcommand("plot", "Align trace CSVs on a common axis");
  std::string axis_text = "iter";
  std::string series_text = "f";
  std::string plot_out;
  std::vector<std::string> trace_files;
  plot_cmd->add_option("--axis", axis_text, "iter, matvecs, cum_cg or wall_ms");
  plot_cmd->add_option("--series", series_text, "f, f_gap, stationarity or snr_db");
  plot_cmd->add_option("-o,--output", plot_out, "Write the table here instead of stdout");
  plot_cmd->add_option("traces", trace_files, "Trace CSV files")->required();
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << library_version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  if (*list_cmd) {
    out << "experiments: " << joined(experiment_names()) << '\n';
    for (const std::string& s : solver_names())
      out << "solver " << s << (solver_keys(s).empty() ? "" : " [" + joined(solver_keys(s)) + "]")
          << '\n';
    return 0;
  }

  if (*plot_cmd) {
    try {
      std::vector<NamedTrace> traces;
      for (const std::string& file : trace_files) {
        std::istringstream in(read_file(file));
        Trace t = read_trace_csv(in);
        traces.emplace_back(t.header_value("solver_spec").value_or(file), std::move(t));
      }
      const std::string table = emit_plot_data(traces, parse_axis(axis_text), parse_series(series_text));
      if (plot_out.empty()) {
        out << table;
      } else {
        std::ofstream f(plot_out, std::ios::binary);
        if (!(f << table)) throw Error("cannot write " + plot_out);
      }
      return 0;
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    }
  }

  ExperimentPlan plan;
  try {
    if (!plan_file.empty()) {
      plan = ExperimentPlan::from_json(read_file(plan_file));
    } else if (!experiment.empty()) {
      plan = make_plan(experiment);
    } else {
      if (problem_text.empty() || solver_texts.empty())
        throw Error("need --experiment NAME or both --problem and --solver (valid experiments: " +
                    joined(experiment_names()) + ")");
      plan.name = "run";
      plan.stop = StopCriteria{};
    }
    if (!problem_text.empty()) plan.problems = {ProblemSpec::parse(problem_text)};
    if (!solver_texts.empty()) {
      plan.solvers.clear();
      for (const std::string& s : solver_texts) plan.solvers.push_back(SolverSpec::parse(s));
    }
    if (!seeds.empty()) plan.seeds = seeds;
    else if (plan.name == "run" && !plan.problems.empty()) plan.seeds = {plan.problems.front().seed};
    if (max_matvecs) plan.stop.max_matvecs = *max_matvecs;
    if (tol) apply_tolerance(plan, *tol);
    if (oracle_iters) plan.oracle_iterations = *oracle_iters;
    if (timing) plan.timing = true;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    RunSettings settings;
    settings.out_root = out_dir;
    settings.jobs = jobs;
    const ExperimentReport report = run_experiment(plan, settings);
    out << summary_table(report.cells);
    out << "wrote " << report.files.size() << " files to " << report.directory.string() << '\n';
    for (const CellOutput& c : report.cells)
      if (!c.summary.error.empty())
        err << "error: " << c.summary.solver << " on " << c.summary.problem << ": "
            << c.summary.error << '\n';
    return report.solver_failure ? 2 : 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace sesop::bench
