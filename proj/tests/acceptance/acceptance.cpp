// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "sesop/baselines.hpp"
#include "sesop/directions.hpp"
#include "sesop/problems.hpp"
#include "sesop/rng.hpp"
#include "sesop/sesop.hpp"
#include "sesop/tn.hpp"
#include "sesop/trace.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace sesop;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Every trace produced in this binary, for the monotone-descent property.
std::vector<std::pair<std::string, Trace>> g_runs;

const Trace& keep(std::string name, const SolveResult& r) {
  g_runs.emplace_back(std::move(name), r.trace);
  return g_runs.back().second;
}

Problem quadratic(std::uint64_t seed) {
  ProblemSpec spec = ProblemSpec::defaults(ProblemKind::quadratic_ls);
  spec.seed = seed;
  return make_problem(spec);
}

const Matrix& dense_of(const Problem& p) { return *p.objective->composite()->op().dense(); }

// Textbook conjugate gradients on H x = b, iterates 0..k_max.
std::vector<Vector> cg_iterates(const std::function<Vector(const Vector&)>& h, const Vector& b,
                                Vector x, int k_max) {
  std::vector<Vector> xs{x};
  Vector r = b - h(x);
  Vector p = r;
  double rr = r.squaredNorm();
  for (int k = 0; k < k_max && rr > 0.0; ++k) {
    const Vector hp = h(p);
    const double alpha = rr / p.dot(hp);
    x += alpha * p;
    r -= alpha * hp;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
    xs.push_back(x);
  }
  return xs;
}

double ls_value(const Matrix& a, const Vector& b, const Vector& x) { return (a * x - b).squaredNorm(); }

// Optimum of exp(-1^T x) + 1/2 sum j^2 x_j^2: x_j = e^{-s} / j^2 where s = sum x_j
// solves s = e^{-s} S, S = sum 1/j^2. Newton on h(s) = s - S e^{-s}.
std::pair<double, Vector> expsquares_optimum(Index n) {
  double big_s = 0.0;
  for (Index j = 1; j <= n; ++j) big_s += 1.0 / double(j * j);
  double s = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double step = (s - big_s * std::exp(-s)) / (1.0 + big_s * std::exp(-s));
    s -= step;
    if (std::abs(step) < 1e-17) break;
  }
  Vector x(n);
  for (Index j = 1; j <= n; ++j) x[j - 1] = std::exp(-s) / double(j * j);
  double f = std::exp(-x.sum());
  for (Index j = 1; j <= n; ++j) f += 0.5 * double(j * j) * x[j - 1] * x[j - 1];
  return {f, x};
}

Outcome criterion1() {
  Stopwatch clock;
  double worst = 0.0, floor = 0.0;
  std::string where;
  Index first_violation = -1;
  for (std::uint64_t seed : {1, 2, 3}) {
    const Problem p = quadratic(seed);
    const Matrix& a = dense_of(p);
    const Vector& b = p.objective->composite()->b();
    const Vector rhs = 2.0 * a.transpose() * b;
    const auto cg = cg_iterates([&](const Vector& v) { return Vector(2.0 * (a.transpose() * (a * v))); },
                                rhs, p.x0, 100);
    const Matrix h = 2.0 * a.transpose() * a;
    const auto cg_explicit = cg_iterates([&](const Vector& v) { return Vector(h * v); }, rhs, p.x0, 100);
    std::vector<double> fcg;
    for (const Vector& x : cg) fcg.push_back(ls_value(a, b, x));
    for (std::size_t k = 0; k < cg.size(); ++k)
      floor = std::max(floor, std::abs(ls_value(a, b, cg_explicit[k]) - fcg[k]) / fcg[k]);

    for (Index l : {1, 10, 40}) {
      SesopTnConfig config;
      config.tn.l_max = l;
      config.tn.stop.grad_tol = 0.0;
      config.tn.stop.max_cg_steps = 100;
      std::map<std::int64_t, double> points;
      RunOptions options;
      options.observer = [&](const IterateEvent& e) { points[e.cum_steps] = ls_value(a, b, e.x); };
      keep("sesop_tn quadratic", run_sesop_tn(*p.objective, p.x0, config, options));
      for (const auto& [k, f] : points) {
        if (k > 100 || k >= std::int64_t(fcg.size())) continue;
        const double dev = std::abs(f - fcg[k]) / std::abs(fcg[k]);
        if (dev > 1e-6 && (first_violation < 0 || k < first_violation)) first_violation = k;
        if (dev > worst) {
          worst = dev;
          where = fmt("seed %d, l_max %d, step %d", int(seed), int(l), int(k));
        }
      }
    }
  }
  const double t = clock.seconds();
  return {worst <= 1e-6 && t < 10.0,
          fmt("max rel f deviation %.3g (%s), first step above 1e-6: %d; two exact-arithmetic-"
              "identical CG codes differ by %.3g over the same window; %.1f s",
              worst, where.c_str(), int(first_violation), floor, t)};
}

Outcome criterion2() {
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    const Problem p = quadratic(seed);
    RunOptions options;
    options.f_opt = p.truth.f_opt;
    SesopTnConfig config;
    config.tn.l_max = 1;
    config.tn.stop.grad_tol = 0.0;
    config.tn.stop.f_tol = 1e-8;
    config.tn.stop.max_cg_steps = 100000;
    config.tn.stop.max_iters = 1000000;
    config.tn.stop.max_matvecs = 100000000;
    const Trace& s = keep("sesop_tn quadratic", run_sesop_tn(*p.objective, p.x0, config, options));
    const bool s_ok = s.status == Status::target_reached;
    const std::int64_t s_steps = s.rows.back().cum_steps;

    TnConfig tn = config.tn;
    tn.stop.max_cg_steps = 10 * s_steps;
    const Trace& c = keep("tn quadratic", run_tn_classic(*p.objective, p.x0, tn, options));
    const bool c_reached = c.status == Status::target_reached;
    const std::int64_t c_steps = c.rows.back().cum_steps;
    const bool ok = s_ok && (!c_reached || c_steps > s_steps);
    pass = pass && ok;
    detail += fmt("seed %d: sesop_tn %lld, tn %s%lld; ", int(seed), (long long)s_steps,
                  c_reached ? "" : "not reached in ", (long long)c_steps);
  }
  return {pass, detail};
}

Outcome criterion3() {
  Stopwatch clock;
  const Index n = 200;
  const auto obj = make_expsquares(n);
  const auto [f_opt, x_opt] = expsquares_optimum(n);
  const Vector x0 = Vector::Zero(n);
  RunOptions options;
  options.f_opt = f_opt;
  bool pass = true;
  std::string detail;
  for (Index l : {1, 10, 40}) {
    SesopTnConfig config;
    config.tn.l_max = l;
    config.tn.stop.grad_tol = 0.0;
    config.tn.stop.f_tol = 1e-8;
    config.tn.stop.max_cg_steps = 100000;
    config.tn.stop.max_iters = 1000000;
    const Trace& s = keep("sesop_tn expsquares", run_sesop_tn(*obj, x0, config, options));
    const std::int64_t s_steps = s.rows.back().cum_steps;
    TnConfig tn = config.tn;
    tn.stop.max_cg_steps = 10 * s_steps;
    const Trace& c = keep("tn expsquares", run_tn_classic(*obj, x0, tn, options));
    const bool c_reached = c.status == Status::target_reached;
    const std::int64_t c_steps = c.rows.back().cum_steps;
    const bool ok = s.status == Status::target_reached && (!c_reached || s_steps <= c_steps);
    pass = pass && ok;
    detail += fmt("l_max %d: sesop_tn %lld, tn %s%lld; ", int(l), (long long)s_steps,
                  c_reached ? "" : "not reached in ", (long long)c_steps);
  }
  const double t = clock.seconds();
  detail += fmt("%.1f s", t);
  return {pass && t < 10.0, detail};
}

Outcome criterion4() {
  double worst = 0.0;
  bool complete = true;
  for (std::uint64_t seed : {1, 2, 3}) {
    const Problem p = quadratic(seed);
    const Matrix& a = dense_of(p);
    const Vector& b = p.objective->composite()->b();
    const int k_max = int(std::min<Index>(a.cols(), 50));
    const auto cg = cg_iterates([&](const Vector& v) { return Vector(2.0 * (a.transpose() * (a * v))); },
                                2.0 * a.transpose() * b, p.x0, k_max);
    SesopConfig config;
    config.first = FirstDirection::gradient;
    config.history = 1;
    config.stop.grad_tol = 0.0;
    config.stop.max_iters = k_max;
    std::vector<Vector> xs;
    RunOptions options;
    options.observer = [&](const IterateEvent& e) {
      if (!e.inner) xs.push_back(e.x);
    };
    keep("sesop quadratic", run_sesop(*p.objective, p.x0, config, options));
    if (xs.size() < cg.size()) complete = false;
    for (std::size_t k = 1; k < std::min(xs.size(), cg.size()); ++k)
      worst = std::max(worst, (xs[k] - cg[k]).norm() / cg[k].norm());
  }
  return {complete && worst <= 1e-8,
          fmt("max rel iterate deviation %.3g over 50 iterations, 3 seeds", worst)};
}

Outcome criterion5() {
  bool pass = true;
  double worst_ratio = 0.0;
  SesopConfig config;
  config.include_orth = true;
  config.stop.grad_tol = 0.0;
  config.stop.max_iters = 200;
  auto check = [&](const Trace& trace, double f_opt, double bound_scale) {
    bool complete = false;
    for (const TraceRow& row : trace.rows) {
      if (row.iter == 0) continue;
      const double k = double(row.iter);
      const double ratio = (row.f - f_opt) * k * k / bound_scale;
      worst_ratio = std::max(worst_ratio, ratio);
      if (ratio > 1.0) pass = false;
      if (row.iter == 200) complete = true;
    }
    // Stopping early is fine only if the run can make no further progress.
    if (!complete && trace.status != Status::stalled && trace.status != Status::converged) pass = false;
  };
  for (std::uint64_t seed : {1, 2, 3}) {
    const Problem p = quadratic(seed);
    const Matrix& a = dense_of(p);
    const Vector& b = p.objective->composite()->b();
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(a.transpose() * a, Eigen::EigenvaluesOnly);
    const double lipschitz = 2.0 * eig.eigenvalues().maxCoeff();
    const Vector x_opt = a.partialPivLu().solve(b);
    const double f_opt = ls_value(a, b, x_opt);
    check(keep("sesop_orth quadratic", run_sesop(*p.objective, p.x0, config)), f_opt,
          lipschitz * (p.x0 - x_opt).squaredNorm());
  }
  const Index n = 200;
  const auto [f_opt, x_opt] = expsquares_optimum(n);
  for (std::uint64_t seed : {1, 2, 3}) {
    ProblemSpec spec = ProblemSpec::defaults(ProblemKind::expsquares);
    spec.seed = seed;
    const Problem p = make_problem(spec);
    Counters c;
    const double f0 = p.objective->value(p.x0, c);
    // Hessian diag(j^2) + e^{-1^T x} 1 1^T, and e^{-1^T x} <= f(x) <= f(x0).
    const double lipschitz = double(n * n) + double(n) * f0;
    check(keep("sesop_orth expsquares", run_sesop(*p.objective, p.x0, config)), f_opt,
          lipschitz * (p.x0 - x_opt).squaredNorm());
  }
  return {pass, fmt("max of (f_k - f_opt) k^2 / (L ||x0 - x*||^2) over k <= 200: %.3g", worst_ratio)};
}

Outcome criterion6() {
  Stopwatch clock;
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    ProblemSpec spec = ProblemSpec::defaults(ProblemKind::l1_ls);
    spec.seed = seed;
    const Problem p = make_problem(spec);
    const auto& obj = *p.objective->composite();

    ProximalConfig oracle;
    oracle.stop.grad_tol = 0.0;
    oracle.stop.max_iters = 100000;
    oracle.stop.max_matvecs = 1000000000;
    const SolveResult ref = run_fista(obj, p.x0, oracle);
    double f_opt = ref.trace.rows.front().f;
    for (const TraceRow& r : ref.trace.rows) f_opt = std::min(f_opt, r.f);

    RunOptions options;
    options.f_opt = f_opt;
    StopCriteria stop;
    stop.grad_tol = 0.0;
    stop.f_tol = 1e-6;
    stop.max_iters = 10000000;
    stop.max_matvecs = 200000;
    auto matvecs = [](const Trace& t) { return t.rows.back().matvecs; };

    SesopConfig sc;
    sc.stop = stop;
    sc.first = FirstDirection::pcd;
    const Trace& pcd = keep("pcd_sesop l1_ls", run_sesop(obj, p.x0, sc, options));
    sc.first = FirstDirection::ssf;
    const Trace& ssf = keep("ssf_sesop l1_ls", run_sesop(obj, p.x0, sc, options));
    const bool sesop_ok = pcd.status == Status::target_reached && ssf.status == Status::target_reached;
    const std::int64_t best = std::max(matvecs(pcd), matvecs(ssf));

    // A baseline that has not reached the target within twice the slower
    // SESOP variant's matvecs needs strictly more than either.
    ProximalConfig pc;
    pc.stop = stop;
    pc.stop.max_matvecs = 2 * best;
    const Trace& fista = keep("fista l1_ls", run_fista(obj, p.x0, pc, options));
    const Trace& ista = keep("ista l1_ls", run_ssf_iteration(obj, p.x0, pc, options));
    auto beaten = [&](const Trace& t) {
      return t.status != Status::target_reached || matvecs(t) > best;
    };
    const bool ok = sesop_ok && beaten(fista) && beaten(ista);
    pass = pass && ok;
    auto show = [&](const Trace& t) {
      return t.status == Status::target_reached ? std::to_string(matvecs(t))
                                                : ">" + std::to_string(matvecs(t));
    };
    detail += fmt("seed %d: pcd_sesop %lld, ssf_sesop %lld, fista %s, ista %s; ", int(seed),
                  (long long)matvecs(pcd), (long long)matvecs(ssf), show(fista).c_str(),
                  show(ista).c_str());
  }
  const double t = clock.seconds();
  detail += fmt("%.1f s", t);
  return {pass && t < 60.0, detail};
}

Outcome criterion7() {
  // ||A x - b||^2 with A = diag(sqrt(lambda)), lambda evenly spread on [1, 100]:
  // Hessian 2 diag(lambda), condition number 100, minimum 0 at x* = A^{-1} b.
  const Index n = 200;
  const double r = 100.0;
  Vector lambda(n);
  for (Index i = 0; i < n; ++i) lambda[i] = 1.0 + (r - 1.0) * double(i) / double(n - 1);
  Rng rng(11);
  const Vector x_star = rng.normal_vector(n);
  const Matrix a = Matrix(lambda.cwiseSqrt().asDiagonal());
  const CompositeObjective obj(std::make_shared<DenseOperator>(a), a * x_star, 0.0);
  // Energy error ||x - x*||_H is sqrt(2 (f - f*)), f* = 0.
  auto energy = [&](const Vector& x) { return std::sqrt(2.0 * (a * (x - x_star)).squaredNorm()); };

  const double cg_rate = (std::sqrt(r) - 1.0) / (std::sqrt(r) + 1.0);
  const double sd_rate = (r - 1.0) / (r + 1.0);

  std::vector<double> cg_err;
  RunOptions cg_options;
  cg_options.observer = [&](const IterateEvent& e) { cg_err.push_back(energy(e.x)); };
  LinearCgOptions cg;
  cg.tol = 1e-10;
  keep("linear_cg diag", run_linear_cg(obj, Vector::Zero(n), cg, cg_options));
  // Contraction per iteration is the geometric mean (e_k / e_0)^{1/k}; single
  // steps oscillate around it and are reported only.
  double cg_worst = 0.0, cg_step_worst = 0.0;
  for (std::size_t k = 1; k < cg_err.size(); ++k) {
    cg_worst = std::max(cg_worst, std::pow(cg_err[k] / cg_err[0], 1.0 / double(k)));
    cg_step_worst = std::max(cg_step_worst, cg_err[k] / cg_err[k - 1]);
  }

  // Worst-case start for steepest descent: equal gradient components on the
  // extreme eigenvectors.
  Vector x0 = x_star;
  x0[0] -= 1.0 / lambda[0];
  x0[n - 1] -= 1.0 / lambda[n - 1];
  std::vector<double> sd_err;
  RunOptions sd_options;
  sd_options.observer = [&](const IterateEvent& e) { sd_err.push_back(energy(e.x)); };
  DescentConfig sd;
  sd.line_search = LineSearchMode::exact_quadratic;
  sd.stop.grad_tol = 0.0;
  sd.stop.max_iters = 100;
  keep("steepest_descent diag", run_steepest_descent(obj, x0, sd, sd_options));
  double sd_min = 1.0, sd_max = 0.0;
  for (std::size_t k = 1; k < sd_err.size(); ++k) {
    const double q = sd_err[k] / sd_err[k - 1];
    sd_min = std::min(sd_min, q);
    sd_max = std::max(sd_max, q);
  }
  const bool pass = cg_err.size() > 1 && cg_worst <= cg_rate + 0.02 && sd_err.size() > 1 &&
                    std::abs(sd_min - sd_rate) <= 0.02 && std::abs(sd_max - sd_rate) <= 0.02;
  return {pass, fmt("cg energy contraction per iteration at most %.4f (bound %.4f + 0.02, %d iterations, "
                    "largest single step %.4f); steepest descent %.4f..%.4f (expected %.4f)",
                    cg_worst, cg_rate, int(cg_err.size()) - 1, cg_step_worst, sd_min, sd_max, sd_rate)};
}

double fd_gradient_error(const Objective& obj, const Vector& x, double h) {
  Counters c;
  const Vector g = obj.gradient(x, c);
  double worst = 0.0;
  Vector probe = x;
  for (Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double up = obj.value(probe, c);
    probe[j] = x[j] - h;
    const double down = obj.value(probe, c);
    probe[j] = x[j];
    worst = std::max(worst, std::abs((up - down) / (2.0 * h) - g[j]) / (1.0 + std::abs(g[j])));
  }
  return worst;
}

Outcome criterion8() {
  std::vector<std::string> failures;
  std::string detail;

  // Gradient checks at random points away from the L1 kinks.
  double grad_worst = 0.0;
  {
    Rng rng(21);
    std::vector<Problem> problems;
    for (auto kind : {ProblemKind::quadratic_ls, ProblemKind::l1_ls, ProblemKind::expsquares,
                      ProblemKind::svm_smooth}) {
      ProblemSpec spec = ProblemSpec::defaults(kind);
      spec.seed = 1;
      if (kind == ProblemKind::l1_ls) spec.mu = 0.1;
      if (kind == ProblemKind::svm_smooth) {
        spec.m = 300;
        spec.n = 120;
      }
      problems.push_back(make_problem(spec));
    }
    for (const Problem& p : problems) {
      const Vector x = rng.normal_vector(p.objective->dim(), 0.1);
      const double h = p.spec.kind == ProblemKind::expsquares ? 1e-6 : 1e-5;
      grad_worst = std::max(grad_worst, fd_gradient_error(*p.objective, x, h));
    }
    if (grad_worst > 1e-5) failures.push_back("gradient");
    detail += fmt("gradient check %.2g; ", grad_worst);
  }

  // SSF surrogate ||r||^2 + 2 r^T A (z - x) + c ||z - x||^2 + mu ||z||_1 >= f(z),
  // equal at z = x.
  {
    double min_gap = 1e300, base_gap = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
      ProblemSpec spec = ProblemSpec::defaults(ProblemKind::l1_ls);
      spec.seed = seed;
      spec.mu = 0.05;
      const Problem p = make_problem(spec);
      const auto& obj = *p.objective->composite();
      const Matrix& a = *obj.op().dense();
      const Vector& b = obj.b();
      const double c = obj.ssf_constant();
      Rng rng(100 + seed);
      const Vector x = rng.normal_vector(obj.dim(), 0.3);
      const Vector r = a * x - b;
      auto f = [&](const Vector& z) { return (a * z - b).squaredNorm() + obj.mu() * z.lpNorm<1>(); };
      auto surrogate = [&](const Vector& z) {
        return r.squaredNorm() + 2.0 * r.dot(a * (z - x)) + c * (z - x).squaredNorm() +
               obj.mu() * z.lpNorm<1>();
      };
      base_gap = std::max(base_gap, std::abs(surrogate(x) - f(x)) / std::abs(f(x)));
      for (int i = 0; i < 100; ++i) {
        const Vector z = x + rng.normal_vector(obj.dim(), std::pow(10.0, -3.0 + 3.0 * rng.uniform()));
        min_gap = std::min(min_gap, (surrogate(z) - f(z)) / std::abs(f(z)));
      }
    }
    if (min_gap < -1e-12 || base_gap > 1e-12) failures.push_back("majorization");
    detail += fmt("majorization min rel gap %.2g, base gap %.2g; ", min_gap, base_gap);
  }

  // Adjoint consistency of every operator.
  {
    double worst = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
      for (auto kind : {ProblemKind::quadratic_ls, ProblemKind::l1_ls, ProblemKind::svm_smooth}) {
        ProblemSpec spec = ProblemSpec::defaults(kind);
        spec.seed = seed;
        const Problem p = make_problem(spec);
        const LinearOperator& op =
            kind == ProblemKind::svm_smooth
                ? static_cast<const SvmObjective&>(*p.objective).data()
                : p.objective->composite()->op();
        worst = std::max(worst, adjoint_mismatch(op, seed));
      }
    }
    if (worst > 1e-10) failures.push_back("adjoint");
    detail += fmt("adjoint mismatch %.2g; ", worst);
  }

  // Byte-identical traces from fresh instances, per seed.
  {
    int compared = 0, differing = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
      auto traces = [&] {
        ProblemSpec spec = ProblemSpec::defaults(ProblemKind::l1_ls);
        spec.seed = seed;
        const Problem l1 = make_problem(spec);
        const Problem q = quadratic(seed);
        StopCriteria stop;
        stop.max_iters = 300;
        std::vector<std::string> out;
        auto csv = [&](const SolveResult& r) {
          std::ostringstream s;
          write_trace_csv(r.trace, s);
          out.push_back(s.str());
        };
        SesopConfig sc;
        sc.stop = stop;
        sc.first = FirstDirection::pcd;
        csv(run_sesop(*l1.objective, l1.x0, sc));
        sc.first = FirstDirection::ssf;
        sc.include_orth = true;
        csv(run_sesop(*l1.objective, l1.x0, sc));
        ProximalConfig pc;
        pc.stop = stop;
        csv(run_fista(*l1.objective->composite(), l1.x0, pc));
        SesopTnConfig tc;
        tc.tn.stop = stop;
        csv(run_sesop_tn(*q.objective, q.x0, tc));
        return out;
      };
      const auto first = traces();
      const auto second = traces();
      for (std::size_t i = 0; i < first.size(); ++i) {
        ++compared;
        if (first[i] != second[i]) ++differing;
      }
    }
    if (differing > 0) failures.push_back("reproducibility");
    detail += fmt("%d of %d repeated traces differ; ", differing, compared);
  }

  // Monotone descent over every solver run above (and in criteria 1-7).
  {
    int checked = 0, violations = 0, exempt = 0;
    for (const auto& [name, trace] : g_runs) {
      if (!trace.monotone) {
        ++exempt;
        continue;
      }
      ++checked;
      for (std::size_t k = 1; k < trace.rows.size(); ++k) {
        if (trace.rows[k].f > trace.rows[k - 1].f) {
          ++violations;
          std::printf("  nonmonotone: %s row %zu\n", name.c_str(), k);
          break;
        }
      }
    }
    if (violations > 0) failures.push_back("monotone");
    detail += fmt("monotone %d/%d runs (%d accelerated runs without a descent guarantee skipped)",
                  checked - violations, checked, exempt);
  }

  std::string failed;
  for (const auto& f : failures) failed += " " + f;
  return {failures.empty(), failed.empty() ? detail : detail + "; failed:" + failed};
}

// Synthetic SVM: expectations only, reported but not gating.
void svm_expectations() {
  for (std::uint64_t seed : {1, 2, 3}) {
    ProblemSpec spec = ProblemSpec::defaults(ProblemKind::svm_smooth);
    spec.seed = seed;
    const Problem p = make_problem(spec);
    SesopTnConfig config;
    config.tn.stop.grad_tol = 1e-6;
    const Trace& s = keep("sesop_tn svm", run_sesop_tn(*p.objective, p.x0, config));
    const Trace& c = keep("tn svm", run_tn_classic(*p.objective, p.x0, config.tn));
    auto stat_ok = [](const Trace& t) {
      return t.rows.back().stationarity <= 1e-6 * std::max(1.0, t.rows.front().stationarity);
    };
    const bool met = stat_ok(s) && stat_ok(c) && s.rows.back().cum_steps <= c.rows.back().cum_steps;
    std::printf("svm expectation seed %d %s: sesop_tn %lld cum CG steps (%s), tn %lld (%s)\n",
                int(seed), met ? "met" : "VIOLATED", (long long)s.rows.back().cum_steps,
                to_string(s.status).c_str(), (long long)c.rows.back().cum_steps,
                to_string(c.status).c_str());
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"sesop_tn quadratic invariance", criterion1},
      {"classic tn degradation at l_max 1", criterion2},
      {"expsquares sesop_tn vs tn", criterion3},
      {"sesop equals cg on quadratics", criterion4},
      {"orth 1/k^2 bound", criterion5},
      {"composite ordering", criterion6},
      {"cg and steepest descent rates", criterion7},
  };
  int failed = 0;
  auto report = [&](int i, const char* name, const Outcome& o) {
    std::printf("criterion %d %s: %s | %s\n", i, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };
  for (std::size_t i = 0; i < criteria.size(); ++i)
    report(int(i) + 1, criteria[i].first, criteria[i].second());
  svm_expectations();
  report(8, "property suites", criterion8());
  std::printf("%d of 8 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
