#include "sesop/bench/experiments.hpp"

#include "sesop/baselines.hpp"
#include "sesop/bench/plot.hpp"
#include "sesop/text.hpp"
#include "sesop/tn.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace sesop::bench {

using nlohmann::json;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"fig2_quadratic_tn", "fig3_expsquares",
                                                 "fig3_svm",          "fig1_l1_recovery",
                                                 "sesop_cg_equiv",    "bound_1k2"};
  return names;
}

namespace {

std::vector<SolverSpec> tn_matrix() {
  std::vector<SolverSpec> out;
  for (const char* name : {"sesop_tn", "tn"})
    for (const char* l : {"1", "10", "40"}) out.push_back(SolverSpec{name, {{"lmax", l}}});
  return out;
}

json stop_to_json(const StopCriteria& s) {
  json j;
  j["grad_tol"] = s.grad_tol;
  j["f_tol"] = s.f_tol ? json(*s.f_tol) : json(nullptr);
  j["max_iters"] = s.max_iters;
  j["max_matvecs"] = s.max_matvecs;
  j["max_cg_steps"] = s.max_cg_steps;
  return j;
}

StopCriteria stop_from_json(const json& j) {
  StopCriteria s;
  s.grad_tol = j.at("grad_tol").get<double>();
  if (!j.at("f_tol").is_null()) s.f_tol = j.at("f_tol").get<double>();
  s.max_iters = j.at("max_iters").get<Index>();
  s.max_matvecs = j.at("max_matvecs").get<std::int64_t>();
  s.max_cg_steps = j.at("max_cg_steps").get<std::int64_t>();
  return s;
}

}  // namespace

std::string ExperimentPlan::to_json() const {
  json j;
  j["name"] = name;
  j["seeds"] = seeds;
  j["problems"] = json::array();
  for (const ProblemSpec& p : problems) j["problems"].push_back(p.to_string());
  j["solvers"] = json::array();
  for (const SolverSpec& s : solvers) j["solvers"].push_back(s.to_string());
  j["stop"] = stop_to_json(stop);
  j["timing"] = timing;
  j["oracle_iterations"] = oracle_iterations;
  j["plot_axes"] = plot_axes;
  return j.dump(2);
}

ExperimentPlan ExperimentPlan::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ExperimentPlan p;
    p.name = j.at("name").get<std::string>();
    p.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    for (const auto& s : j.at("problems")) p.problems.push_back(ProblemSpec::parse(s.get<std::string>()));
    for (const auto& s : j.at("solvers")) p.solvers.push_back(SolverSpec::parse(s.get<std::string>()));
    p.stop = stop_from_json(j.at("stop"));
    p.timing = j.at("timing").get<bool>();
    p.oracle_iterations = j.at("oracle_iterations").get<Index>();
    p.plot_axes = j.at("plot_axes").get<std::vector<std::string>>();
    return p;
  } catch (const json::exception& e) {
    throw Error(std::string("bad experiment plan: ") + e.what());
  }
}

ExperimentPlan make_plan(const std::string& name) {
  ExperimentPlan p;
  p.name = name;
  if (name == "fig2_quadratic_tn") {
    p.problems = {ProblemSpec::defaults(ProblemKind::quadratic_ls)};
    p.solvers = {SolverSpec{"linear_cg", {}}};
    for (SolverSpec& s : tn_matrix()) p.solvers.push_back(std::move(s));
    p.stop.grad_tol = 0.0;
    p.stop.f_tol = 1e-8;
    p.stop.max_cg_steps = 4000;
    p.plot_axes = {"cum_cg", "matvecs"};
  } else if (name == "fig3_expsquares") {
    p.problems = {ProblemSpec::defaults(ProblemKind::expsquares)};
    p.solvers = tn_matrix();
    p.stop.grad_tol = 0.0;
    p.stop.f_tol = 1e-8;
    p.stop.max_cg_steps = 20000;
    p.plot_axes = {"cum_cg"};
  } else if (name == "fig3_svm") {
    p.problems = {ProblemSpec::defaults(ProblemKind::svm_smooth)};
    p.solvers = tn_matrix();
    p.stop.grad_tol = 1e-6;
    p.stop.max_cg_steps = 20000;
    p.stop.max_matvecs = 200000;
    p.oracle_iterations = 2000;
    p.plot_axes = {"cum_cg"};
  } else if (name == "fig1_l1_recovery") {
    p.problems = {ProblemSpec::defaults(ProblemKind::l1_ls)};
    p.solvers = {SolverSpec{"pcd_sesop", {}}, SolverSpec{"ssf_sesop", {}}, SolverSpec{"pcd", {}},
                 SolverSpec{"ssf", {}},       SolverSpec{"ista", {}},      SolverSpec{"fista", {}}};
    p.stop.grad_tol = 0.0;
    p.stop.f_tol = 1e-8;
    p.stop.max_matvecs = 20000;
    p.plot_axes = {"iter", "matvecs", "wall_ms"};
  } else if (name == "sesop_cg_equiv") {
    p.problems = {ProblemSpec::defaults(ProblemKind::quadratic_ls)};
    p.solvers = {SolverSpec{"linear_cg", {}}, SolverSpec{"sesop", {{"M", "1"}}}};
    p.stop.grad_tol = 0.0;
    p.stop.max_iters = 50;
  } else if (name == "bound_1k2") {
    p.problems = {ProblemSpec::defaults(ProblemKind::quadratic_ls),
                  ProblemSpec::defaults(ProblemKind::expsquares)};
    p.solvers = {SolverSpec{"sesop_orth", {}}};
    p.stop.grad_tol = 0.0;
    p.stop.max_iters = 200;
  } else {
    std::string valid;
    for (const std::string& n : experiment_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw Error("unknown experiment '" + name + "' (valid: " + valid + ")");
  }
  return p;
}

void apply_tolerance(ExperimentPlan& plan, double tol) {
  if (plan.stop.f_tol) plan.stop.f_tol = tol;
  else plan.stop.grad_tol = tol;
}

ReferenceSolution reference_solution(const Problem& problem, Index oracle_iterations) {
  ReferenceSolution ref;
  if (problem.truth.f_opt) {
    ref.f_opt = problem.truth.f_opt;
    ref.x_opt = problem.truth.x_opt;
    ref.method = "analytic";
    return ref;
  }
  if (const CompositeObjective* comp = problem.objective->composite()) {
    ProximalConfig c;
    c.stop.grad_tol = 0.0;
    c.stop.max_iters = oracle_iterations;
    c.stop.max_matvecs = std::numeric_limits<std::int64_t>::max();
    // FISTA is not monotone; keep the best iterate it visits.
    Counters side;
    double best = INFINITY;
    Vector best_x;
    RunOptions o;
    o.observer = [&](const IterateEvent& e) {
      const double f = comp->value(e.x, side);
      if (f < best) {
        best = f;
        best_x = e.x;
      }
    };
    run_fista(*comp, problem.x0, c, o);
    ref.f_opt = best;
    ref.x_opt = std::move(best_x);
    ref.method = "fista x" + std::to_string(oracle_iterations);
    return ref;
  }
  SesopTnConfig c;
  c.tn.l_max = 40;
  c.tn.stop.grad_tol = 1e-12;
  c.tn.stop.max_iters = oracle_iterations;
  c.tn.stop.max_matvecs = std::numeric_limits<std::int64_t>::max();
  SolveResult r = run_sesop_tn(*problem.objective, problem.x0, c);
  ref.f_opt = r.trace.rows.back().f;
  ref.x_opt = std::move(r.x);
  ref.method = "sesop_tn lmax=40 x" + std::to_string(oracle_iterations);
  return ref;
}

std::optional<std::size_t> first_row_within_tol(const Trace& trace, const StopCriteria& stop) {
  if (trace.rows.empty()) return std::nullopt;
  const bool use_gap = stop.f_tol && trace.rows.front().f_gap;
  const double stat_target = stop.grad_tol * std::max(1.0, trace.rows.front().stationarity);
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const TraceRow& r = trace.rows[i];
    if (use_gap ? (r.f_gap && *r.f_gap <= *stop.f_tol) : r.stationarity <= stat_target) return i;
  }
  return std::nullopt;
}

namespace {

struct PreparedProblem {
  Problem problem;
  ReferenceSolution ref;
  std::optional<double> lipschitz;  // bound_1k2 only
};

struct Cell {
  std::size_t problem_index = 0;
  SolverSpec solver;
  std::vector<Vector> iterates;  // sesop_cg_equiv only
  CellOutput out;
};

std::string stem(const ProblemSpec& spec) {
  return sesop::to_string(spec.kind) + "_seed" + std::to_string(spec.seed);
}

std::optional<double> lipschitz_constant(const Problem& p) {
  if (const CompositeObjective* comp = p.objective->composite()) {
    const Matrix* a = comp->op().dense();
    if (!a || comp->mu() != 0.0) return std::nullopt;
    Eigen::BDCSVD<Matrix> svd(*a);
    const double s = svd.singularValues()(0);
    return 2.0 * s * s;
  }
  if (const auto* e = dynamic_cast<const ExpSquares*>(p.objective.get())) {
    Counters side;
    return e->lipschitz_bound(e->value(p.x0, side));
  }
  return std::nullopt;
}

void run_cell(const ExperimentPlan& plan, const PreparedProblem& pp, Cell& cell) {
  const Problem& problem = pp.problem;
  SummaryRow& row = cell.out.summary;
  row.problem = problem.spec.to_string();
  row.seed = problem.spec.seed;
  row.solver = cell.solver.to_string();
  row.file = stem(problem.spec) + "_" + cell.solver.label() + ".csv";

  RunOptions options;
  options.f_opt = pp.ref.f_opt;
  if (problem.spec.kind == ProblemKind::l1_ls) options.x_true = problem.x_true;
  options.record_time = plan.timing;
  if (plan.name == "sesop_cg_equiv")
    options.observer = [&](const IterateEvent& e) {
      if (!e.inner) cell.iterates.push_back(e.x);
    };

  Trace& trace = cell.out.trace;
  try {
    SolveResult r = run_solver(cell.solver, problem, plan.stop, options);
    trace = std::move(r.trace);
    if (problem.spec.kind == ProblemKind::l1_ls && problem.x_true)
      row.final_snr_db = recovery_snr_db(r.x, *problem.x_true);
  } catch (const Error& e) {
    row.error = e.what();
    trace.status = Status::failed;
    trace.events.push_back(std::string("error: ") + e.what());
  }
  trace.set_header("experiment", plan.name);
  trace.set_header("problem", row.problem);
  trace.set_header("seed", std::to_string(row.seed));
  trace.set_header("solver_spec", row.solver);
  trace.set_header("reference", pp.ref.f_opt ? pp.ref.method + " f_opt=" + format_double(*pp.ref.f_opt)
                                             : std::string("none"));

  row.status = trace.status;
  if (!trace.rows.empty()) {
    const TraceRow& last = trace.rows.back();
    row.iters = last.iter;
    row.cum_steps = last.cum_steps;
    row.final_f = last.f;
    row.final_gap = last.f_gap;
    row.matvecs = last.matvecs;
    if (auto hit = first_row_within_tol(trace, plan.stop)) {
      row.matvecs_to_tol = trace.rows[*hit].matvecs;
      row.cum_steps_to_tol = trace.rows[*hit].cum_steps;
    }
  }

  if (plan.name == "bound_1k2" && pp.lipschitz && pp.ref.x_opt && pp.ref.f_opt) {
    const double scale = *pp.lipschitz * (problem.x0 - *pp.ref.x_opt).squaredNorm();
    double worst = 0.0;
    for (const TraceRow& r : trace.rows) {
      if (r.iter < 1) continue;
      const double k = static_cast<double>(r.iter);
      worst = std::max(worst, (r.f - *pp.ref.f_opt) * k * k / scale);
    }
    row.extra["max_bound_ratio"] = worst;
  }
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "-"; }
std::string opt(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : "-"; }

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("cannot write " + path.string());
}

}  // namespace

std::string summary_table(const std::vector<CellOutput>& cells) {
  std::set<std::string> extra_keys;
  for (const CellOutput& c : cells)
    for (const auto& [k, v] : c.summary.extra) extra_keys.insert(k);
  std::ostringstream s;
  s << "problem\tseed\tsolver\tstatus\titers\tcum_steps\tmatvecs\tfinal_f\tfinal_gap"
       "\tmatvecs_to_tol\tcum_steps_to_tol\tfinal_snr_db";
  for (const std::string& k : extra_keys) s << '\t' << k;
  s << '\n';
  for (const CellOutput& c : cells) {
    const SummaryRow& r = c.summary;
    s << r.problem << '\t' << r.seed << '\t' << r.solver << '\t'
      << (r.error.empty() ? sesop::to_string(r.status) : "error") << '\t' << r.iters << '\t'
      << r.cum_steps << '\t' << r.matvecs << '\t' << format_double(r.final_f) << '\t'
      << opt(r.final_gap) << '\t' << opt(r.matvecs_to_tol) << '\t' << opt(r.cum_steps_to_tol)
      << '\t' << opt(r.final_snr_db);
    for (const std::string& k : extra_keys) {
      auto it = r.extra.find(k);
      s << '\t' << (it == r.extra.end() ? "-" : format_double(it->second));
    }
    s << '\n';
  }
  return s.str();
}

ExperimentReport run_experiment(const ExperimentPlan& plan, const RunSettings& settings) {
  if (plan.problems.empty()) throw Error("experiment has no problems");
  if (plan.solvers.empty()) throw Error("experiment has no solvers");
  if (plan.seeds.empty()) throw Error("experiment has no seeds");
  for (const SolverSpec& s : plan.solvers) validate(s);

  std::vector<PreparedProblem> prepared;
  for (const ProblemSpec& base : plan.problems)
    for (std::uint64_t seed : plan.seeds) {
      ProblemSpec spec = base;
      spec.seed = seed;
      PreparedProblem pp;
      pp.problem = make_problem(spec);
      prepared.push_back(std::move(pp));
    }

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < prepared.size(); ++i)
    for (const SolverSpec& s : plan.solvers) {
      Cell c;
      c.problem_index = i;
      c.solver = s;
      cells.push_back(std::move(c));
    }

  // Work items: reference solves first, then cells. Each writes only its
  // own slot, so the outcome does not depend on scheduling.
  auto parallel_for = [&](std::size_t count, const std::function<void(std::size_t)>& body) {
    const unsigned jobs = std::max(1u, std::min<unsigned>(settings.jobs, static_cast<unsigned>(count)));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  };

  parallel_for(prepared.size(), [&](std::size_t i) {
    PreparedProblem& pp = prepared[i];
    pp.ref = reference_solution(pp.problem, plan.oracle_iterations);
    if (plan.name == "bound_1k2") pp.lipschitz = lipschitz_constant(pp.problem);
  });
  parallel_for(cells.size(), [&](std::size_t i) { run_cell(plan, prepared[cells[i].problem_index], cells[i]); });

  if (plan.name == "sesop_cg_equiv") {
    for (std::size_t p = 0; p < prepared.size(); ++p) {
      const Cell* cg = nullptr;
      for (const Cell& c : cells)
        if (c.problem_index == p && c.solver.name == "linear_cg") cg = &c;
      if (!cg) continue;
      const std::size_t horizon = static_cast<std::size_t>(
          std::min<Index>(prepared[p].problem.objective->dim(), 50));
      for (Cell& c : cells) {
        if (c.problem_index != p || &c == cg) continue;
        const std::size_t count = std::min({horizon + 1, c.iterates.size(), cg->iterates.size()});
        double dev = 0.0;
        for (std::size_t k = 1; k < count; ++k) {
          const double denom = std::max(cg->iterates[k].norm(), 1e-300);
          dev = std::max(dev, (c.iterates[k] - cg->iterates[k]).norm() / denom);
        }
        c.out.summary.extra["max_traj_dev"] = dev;
      }
    }
  }

  ExperimentReport report;
  report.plan = plan;
  report.directory = settings.out_root / plan.name;
  for (Cell& c : cells) {
    if (c.out.summary.status == Status::failed || !c.out.summary.error.empty())
      report.solver_failure = true;
    report.cells.push_back(std::move(c.out));
  }
  if (!settings.write_files) return report;

  std::filesystem::create_directories(report.directory);
  for (const CellOutput& c : report.cells) {
    std::ostringstream s;
    write_trace_csv(c.trace, s);
    write_text(report.directory / c.summary.file, s.str());
    report.files.push_back(c.summary.file);
  }
  write_text(report.directory / "summary.tsv", summary_table(report.cells));
  report.files.push_back("summary.tsv");

  for (std::size_t p = 0; p < prepared.size(); ++p) {
    std::vector<NamedTrace> group;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].problem_index == p && !report.cells[i].trace.rows.empty())
        group.emplace_back(cells[i].solver.label(), report.cells[i].trace);
    if (group.empty()) continue;
    std::vector<std::string> names;
    for (const auto& g : group) names.push_back(g.first);
    std::vector<Series> series{prepared[p].ref.f_opt ? Series::f_gap : Series::f};
    if (prepared[p].problem.spec.kind == ProblemKind::l1_ls) series.push_back(Series::snr_db);
    for (const std::string& axis_name : plan.plot_axes) {
      const Axis axis = parse_axis(axis_name);
      if (axis == Axis::wall_ms && !plan.timing) continue;
      for (Series s : series) {
        const std::string base = stem(prepared[p].problem.spec) + "_" + to_string(s) + "_vs_" + axis_name;
        write_text(report.directory / (base + ".tsv"), emit_plot_data(group, axis, s));
        write_text(report.directory / (base + ".gp"), gnuplot_script(base + ".tsv", names, axis, s));
        report.files.push_back(base + ".tsv");
        report.files.push_back(base + ".gp");
      }
    }
  }

  json manifest;
  manifest["created_utc"] = utc_timestamp();
  manifest["library_version"] = library_version();
  manifest["plan"] = json::parse(plan.to_json());
  manifest["solver_failure"] = report.solver_failure;
  manifest["cells"] = json::array();
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const SummaryRow& r = report.cells[i].summary;
    json c;
    c["file"] = r.file;
    c["problem"] = r.problem;
    c["seed"] = r.seed;
    c["solver"] = r.solver;
    c["status"] = sesop::to_string(r.status);
    c["reference"] = prepared[cells[i].problem_index].ref.method;
    if (!r.error.empty()) c["error"] = r.error;
    manifest["cells"].push_back(c);
  }
  report.files.push_back("manifest.json");
  manifest["files"] = report.files;
  write_text(report.directory / "manifest.json", manifest.dump(2) + "\n");
  return report;
}

}  // namespace sesop::bench
