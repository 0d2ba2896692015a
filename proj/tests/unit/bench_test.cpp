#include "sesop/bench/cli.hpp"
#include "sesop/bench/experiments.hpp"
#include "sesop/bench/plot.hpp"
#include "sesop/bench/solvers.hpp"
#include "sesop/text.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sesop;
using namespace sesop::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sesop_bench_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "sesop-bench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(int(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

Trace make_trace(const std::string& problem, std::vector<std::pair<std::int64_t, double>> points) {
  Trace t;
  t.set_header("problem", problem);
  t.set_header("timing", "0");
  Index i = 0;
  for (auto [mv, f] : points) {
    TraceRow r;
    r.iter = i++;
    r.matvecs = mv;
    r.f = f;
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace

TEST(SolverSpecTest, ParseAndPrint) {
  const SolverSpec a = SolverSpec::parse("sesop_tn,lmax=10,force=0.1");
  EXPECT_EQ(a.name, "sesop_tn");
  EXPECT_EQ(a.params.at("lmax"), "10");
  EXPECT_EQ(SolverSpec::parse(a.to_string()), a);
  EXPECT_EQ(SolverSpec::parse("solver=fista,restart=1").name, "fista");
  EXPECT_EQ(a.label(), "sesop_tn_force0.1_lmax10");
  EXPECT_THROW(SolverSpec::parse("lmax=3"), Error);
  EXPECT_THROW(SolverSpec::parse("fista,solver=ista"), Error);
}

TEST(SolverSpecTest, ValidateNamesAndKeys) {
  for (const std::string& name : solver_names()) EXPECT_NO_THROW(validate(SolverSpec{name, {}}));
  EXPECT_THROW(validate(SolverSpec{"nope", {}}), Error);
  EXPECT_THROW(validate(SolverSpec{"fista", {{"lmax", "3"}}}), Error);
  try {
    validate(SolverSpec{"nope", {}});
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("sesop_tn"), std::string::npos);
  }
}

TEST(SolverSpecTest, EverySolverRunsOnItsProblemClass) {
  ProblemSpec l1 = ProblemSpec::defaults(ProblemKind::l1_ls);
  l1.m = 30;
  l1.n = 60;
  l1.seed = 1;
  ProblemSpec quad = ProblemSpec::defaults(ProblemKind::quadratic_ls);
  quad.m = quad.n = 30;
  quad.seed = 1;
  const Problem pl = make_problem(l1), pq = make_problem(quad);
  StopCriteria stop;
  stop.max_iters = 20;
  for (const std::string& name : solver_names()) {
    const bool composite_only = name == "pcd_sesop" || name == "ssf_sesop" || name == "pcd" ||
                                name == "ssf" || name == "fista" || name == "ista";
    const Problem& p = composite_only ? pl : pq;
    const SolveResult r = run_solver(SolverSpec{name, {}}, p, stop, RunOptions{});
    EXPECT_FALSE(r.trace.rows.empty()) << name;
    EXPECT_NE(r.trace.status, Status::failed) << name;
    EXPECT_LE(r.trace.rows.back().f, r.trace.rows.front().f) << name;
  }
}

TEST(Plot, StepInterpolationOnUnionGrid) {
  const std::vector<NamedTrace> traces = {
      {"a", make_trace("p", {{0, 4.0}, {2, 2.0}, {4, 1.0}})},
      {"b", make_trace("p", {{1, 3.0}, {4, 0.5}})},
  };
  const std::string table = emit_plot_data(traces, Axis::matvecs, Series::f);
  EXPECT_EQ(table,
            "matvecs\ta\tb\n"
            "0\t4\tNaN\n"
            "1\t4\t3\n"
            "2\t2\t3\n"
            "4\t1\t0.5\n");
}

TEST(Plot, RefusesIncomparableOrUntimedTraces) {
  const std::vector<NamedTrace> mixed = {{"a", make_trace("p", {{0, 1.0}})}, {"b", make_trace("q", {{0, 1.0}})}};
  try {
    emit_plot_data(mixed, Axis::iter);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "incomparable traces");
  }
  const std::vector<NamedTrace> untimed = {{"a", make_trace("p", {{0, 1.0}})}};
  EXPECT_THROW(emit_plot_data(untimed, Axis::wall_ms), Error);
  EXPECT_THROW(parse_axis("time"), Error);
  EXPECT_EQ(parse_series("f_gap"), Series::f_gap);
}

TEST(Plans, JsonRoundTripForEveryExperiment) {
  for (const std::string& name : experiment_names()) {
    const ExperimentPlan p = make_plan(name);
    EXPECT_EQ(ExperimentPlan::from_json(p.to_json()), p) << name;
    for (const SolverSpec& s : p.solvers) EXPECT_NO_THROW(validate(s)) << name;
  }
  EXPECT_THROW(make_plan("fig9"), Error);
}

TEST(Plans, ToleranceTargetsGapOrStationarity) {
  ExperimentPlan p = make_plan("fig2_quadratic_tn");
  ASSERT_TRUE(p.stop.f_tol);
  apply_tolerance(p, 1e-5);
  EXPECT_EQ(*p.stop.f_tol, 1e-5);
  ExperimentPlan s = make_plan("fig3_svm");
  apply_tolerance(s, 1e-4);
  EXPECT_EQ(s.stop.grad_tol, 1e-4);
}

TEST(Plans, FirstRowWithinTolerance) {
  Trace t = make_trace("p", {{0, 3.0}, {1, 2.0}, {2, 1.0}});
  for (std::size_t k = 0; k < 3; ++k) {
    t.rows[k].f_gap = t.rows[k].f - 1.0;
    t.rows[k].stationarity = 10.0 / double(1 + 10 * k);
  }
  StopCriteria stop;
  stop.f_tol = 1.5;
  EXPECT_EQ(first_row_within_tol(t, stop), 1u);
  stop.f_tol.reset();
  stop.grad_tol = 0.05;  // relative to the initial 10
  EXPECT_EQ(first_row_within_tol(t, stop), 2u);
  stop.grad_tol = 1e-6;
  EXPECT_FALSE(first_row_within_tol(t, stop));
}

TEST(Experiment, FilesAndSummaryAgreeWithTraces) {
  ExperimentPlan plan;
  plan.name = "run";
  plan.seeds = {1, 2};
  ProblemSpec l1 = ProblemSpec::defaults(ProblemKind::l1_ls);
  l1.m = 30;
  l1.n = 60;
  plan.problems = {l1};
  plan.solvers = {SolverSpec::parse("pcd_sesop"), SolverSpec::parse("fista")};
  plan.stop.grad_tol = 0.0;
  plan.stop.f_tol = 1e-6;
  plan.stop.max_iters = 2000;
  plan.oracle_iterations = 3000;
  RunSettings settings;
  settings.out_root = scratch_dir("summary");
  settings.jobs = 2;
  const ExperimentReport report = run_experiment(plan, settings);
  EXPECT_FALSE(report.solver_failure);
  ASSERT_EQ(report.cells.size(), 4u);
  int csv = 0;
  for (const std::string& f : report.files) {
    EXPECT_TRUE(fs::exists(report.directory / f)) << f;
    if (f.ends_with(".csv")) ++csv;
  }
  EXPECT_EQ(csv, 4);
  EXPECT_TRUE(fs::exists(report.directory / "summary.tsv"));
  EXPECT_TRUE(fs::exists(report.directory / "manifest.json"));
  for (const CellOutput& c : report.cells) {
    std::istringstream in(slurp(report.directory / c.summary.file));
    const Trace t = read_trace_csv(in);
    ASSERT_EQ(t.rows.size(), c.trace.rows.size());
    EXPECT_EQ(c.summary.final_f, t.rows.back().f);
    EXPECT_EQ(c.summary.matvecs, t.rows.back().matvecs);
    EXPECT_EQ(c.summary.iters, t.rows.back().iter);
    const auto hit = first_row_within_tol(t, plan.stop);
    EXPECT_EQ(c.summary.matvecs_to_tol.has_value(), hit.has_value());
    if (hit) EXPECT_EQ(*c.summary.matvecs_to_tol, t.rows[*hit].matvecs);
  }
  const std::string summary = slurp(report.directory / "summary.tsv");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 5);
}

TEST(Cli, ListAndBadArguments) {
  std::string out, err;
  EXPECT_EQ(run_cli({"list"}, &out), 0);
  EXPECT_NE(out.find("sesop_tn"), std::string::npos);
  EXPECT_NE(out.find("fig2"), std::string::npos);
  EXPECT_EQ(run_cli({"--bogus"}, nullptr, &err), 1);
  EXPECT_EQ(run_cli({"--experiment", "fig9"}, nullptr, &err), 1);
  EXPECT_NE(err.find("fig2"), std::string::npos);
  EXPECT_EQ(run_cli({"--problem", "kind=l1_ls", "--solver", "nope"}, nullptr, &err), 1);
  EXPECT_EQ(run_cli({"--problem", "kind=cubes", "--solver", "fista"}, nullptr, &err), 1);
  EXPECT_EQ(run_cli({"--solver", "fista"}, nullptr, &err), 1);
}

TEST(Cli, SolverFailureExitsTwo) {
  const fs::path out = scratch_dir("failure");
  std::string err;
  EXPECT_EQ(run_cli({"--problem", "kind=expsquares,n=10", "--solver", "pcd_sesop", "--out", out.string()},
                    nullptr, &err),
            2);
  EXPECT_NE(err.find("composite"), std::string::npos);
}

TEST(Cli, RunsAreByteIdentical) {
  const std::vector<std::string> base = {"--problem", "kind=l1_ls,m=30,n=60", "--solver", "ssf_sesop",
                                         "--solver", "sesop_orth", "--seed", "1,2", "--oracle-iters", "2000",
                                         "--max-matvecs", "2000"};
  std::vector<std::string> contents[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path out = scratch_dir("repro" + std::to_string(run));
    auto args = base;
    args.insert(args.end(), {"--out", out.string(), "--jobs", run == 0 ? "1" : "3"});
    ASSERT_EQ(run_cli(args), 0);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(out / "run"))
      if (e.path().extension() == ".csv" || e.path().extension() == ".tsv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    EXPECT_EQ(files.size(), 4u + 1u + 4u);  // traces, summary, two plot tables per seed
    for (const auto& f : files) contents[run].push_back(f.filename().string() + "\n" + slurp(f));
  }
  EXPECT_EQ(contents[0], contents[1]);
}

TEST(Cli, PlotSubcommand) {
  const fs::path out = scratch_dir("plot");
  ASSERT_EQ(run_cli({"--problem", "kind=quadratic_ls,n=20", "--solver", "linear_cg", "--solver", "sesop",
                     "--out", out.string()}),
            0);
  std::vector<std::string> traces;
  for (const auto& e : fs::directory_iterator(out / "run"))
    if (e.path().extension() == ".csv") traces.push_back(e.path().string());
  ASSERT_EQ(traces.size(), 2u);
  std::string table;
  std::vector<std::string> args = {"plot", "--axis", "matvecs", "--series", "f"};
  args.insert(args.end(), traces.begin(), traces.end());
  ASSERT_EQ(run_cli(args, &table), 0);
  EXPECT_EQ(table.rfind("matvecs\t", 0), 0u);
  args[2] = "wall_ms";
  EXPECT_EQ(run_cli(args), 1);
}
