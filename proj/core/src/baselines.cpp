#include "sesop/baselines.hpp"

#include "sesop/directions.hpp"
#include "sesop/subspace.hpp"
#include "sesop/text.hpp"

#include <cmath>
#include <limits>

namespace sesop {

namespace {

void set_headers(Trace& trace, const std::string& solver, const std::string& config,
                 const std::string& objective, const std::string& axis) {
  trace.set_header("solver", solver);
  trace.set_header("solver_config", config);
  trace.set_header("objective", objective);
  trace.set_header("cum_steps_axis", axis);
}

std::string describe(const LinearCgOptions& cg) {
  return "tol=" + format_double(cg.tol) + ",max_iter=" + std::to_string(cg.max_iter);
}

// Plain CG recurrences on H s = r0 starting from x0; apply counts its own
// products. value(x, f_rec) yields the f reported for iterate x given the
// recurrence estimate.
void linear_cg_loop(const SpdApply& apply, Vector r, Vector& x, const LinearCgOptions& cg,
                    const RunOptions& options, double f0,
                    const std::function<double(const Vector&, double)>& value, Counters& counters,
                    Trace& trace) {
  TraceRecorder recorder(trace, options, counters);
  double rr = r.squaredNorm();
  const double target = cg.tol * std::sqrt(rr);
  double f_rec = f0;
  double f = f0;
  Index iter = 0;
  recorder.record(iter, iter, f, std::sqrt(rr), x);

  Vector p = r;
  Status status = Status::running;
  for (;;) {
    if (cg.f_tol && options.f_opt && f - *options.f_opt <= *cg.f_tol) {
      status = Status::target_reached;
      break;
    }
    if (std::sqrt(rr) <= target || rr == 0.0) {
      status = Status::converged;
      break;
    }
    if (iter >= cg.max_iter) {
      status = Status::max_iterations;
      break;
    }
    const Vector hp = apply(p);
    const double curv = p.dot(hp);
    if (!(curv > 0.0)) {
      trace.events.push_back("iter " + std::to_string(iter) + ": breakdown, p^T H p = " +
                             format_double(curv));
      status = Status::failed;
      break;
    }
    const double alpha = rr / curv;
    x += alpha * p;
    r -= alpha * hp;
    f_rec -= 0.5 * alpha * rr;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
    ++iter;
    f = value(x, f_rec);
    recorder.record(iter, iter, f, std::sqrt(rr), x);
  }
  trace.status = status;
}

Vector prox_step(const CompositeObjective& obj, const Vector& y, const Vector& aty, double c) {
  const double tau = obj.mu() / (2.0 * c);
  Vector out(y.size());
  for (Index j = 0; j < y.size(); ++j) out[j] = soft_threshold(y[j] - aty[j] / c, tau);
  return out;
}

double resolve_c(const CompositeObjective& obj, const ProximalConfig& config) {
  const double c = config.c > 0.0 ? config.c : obj.ssf_constant();
  if (!(c > 0.0)) throw Error("invalid majorizer");
  return c;
}

}  // namespace

SolveResult run_linear_cg(const SpdApply& apply, const Vector& b, const Vector& x0,
                          const LinearCgOptions& cg, const RunOptions& options) {
  if (b.size() != x0.size()) throw Error("linear_cg: dimension mismatch");
  SolveResult out;
  set_headers(out.trace, "linear_cg", describe(cg), "quadratic 1/2 x^T H x - b^T x",
              "CG iterations");
  Counters counters;
  const SpdApply counted = [&](const Vector& v) {
    ++counters.hvps;
    return apply(v);
  };
  Vector x = x0;
  const Vector hx = counted(x0);
  const double f0 = 0.5 * x0.dot(hx) - b.dot(x0);
  linear_cg_loop(counted, b - hx, x, cg, options, f0,
                 [](const Vector&, double f_rec) { return f_rec; }, counters, out.trace);
  out.x = std::move(x);
  return out;
}

SolveResult run_linear_cg(const Objective& quadratic, const Vector& x0, const LinearCgOptions& cg,
                          const RunOptions& options) {
  if (!quadratic.capabilities().has(Capability::hvp)) throw Error("linear_cg: objective has no HVP");
  SolveResult out;
  set_headers(out.trace, "linear_cg", describe(cg), quadratic.name(), "CG iterations");
  Counters counters;
  Counters side;
  const Vector g0 = quadratic.gradient(x0, counters);
  const double f0 = quadratic.value(x0, side);
  Vector x = x0;
  linear_cg_loop([&](const Vector& v) { return quadratic.hvp(x0, v, counters); }, -g0, x, cg,
                 options, f0, [&](const Vector& xi, double) { return quadratic.value(xi, side); },
                 counters, out.trace);
  out.x = std::move(x);
  return out;
}

SolveResult run_fista(const CompositeObjective& obj, const Vector& x0, const ProximalConfig& config,
                      const RunOptions& options) {
  const double c = resolve_c(obj, config);
  SolveResult out;
  Trace& trace = out.trace;
  set_headers(trace, "fista",
              "c=" + format_double(c) + ",restart=" + (config.restart ? "1" : "0"), obj.name(),
              "iterations");
  trace.monotone = config.restart;
  Counters counters;
  TraceRecorder recorder(trace, options, counters);
  StopRule stop(config.stop, options);

  Vector x = x0;
  ++counters.fevals;
  Vector r = obj.residual(x, counters);
  double f = obj.value_from_residual(r, x);
  Vector y = x;
  Vector ry = r;
  Vector x_next = prox_step(obj, y, obj.op().adjoint(ry, counters), c);
  double t = 1.0;
  Index iter = 0;
  double stat = (x_next - y).lpNorm<Eigen::Infinity>();
  recorder.record(iter, iter, f, stat, x);

  Status status = Status::running;
  while ((status = stop.check(iter, f, stat, counters, iter)) == Status::running) {
    ++counters.fevals;
    Vector r_next = obj.residual(x_next, counters);
    const double f_next = obj.value_from_residual(r_next, x_next);
    stat = (x_next - y).lpNorm<Eigen::Infinity>();
    if (config.restart && f_next > f) {
      trace.events.push_back("iter " + std::to_string(iter) + ": restart");
      t = 1.0;
      y = x;
      ry = r;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      y = x_next + beta * (x_next - x);
      ry = r_next + beta * (r_next - r);
      x = std::move(x_next);
      r = std::move(r_next);
      f = f_next;
      t = t_next;
    }
    x_next = prox_step(obj, y, obj.op().adjoint(ry, counters), c);
    ++iter;
    recorder.record(iter, iter, f, stat, x);
  }
  trace.status = status;
  out.x = std::move(x);
  return out;
}

SolveResult run_ssf_iteration(const CompositeObjective& obj, const Vector& x0,
                              const ProximalConfig& config, const RunOptions& options) {
  const double c = resolve_c(obj, config);
  SolveResult out;
  Trace& trace = out.trace;
  set_headers(trace, "ssf_iteration", "c=" + format_double(c), obj.name(), "iterations");
  Counters counters;
  TraceRecorder recorder(trace, options, counters);
  StopRule stop(config.stop, options);

  Vector x = x0;
  ++counters.fevals;
  Vector r = obj.residual(x, counters);
  double f = obj.value_from_residual(r, x);
  Vector d = ssf_from_correlation(obj, x, obj.op().adjoint(r, counters), c);
  double stat = d.lpNorm<Eigen::Infinity>();
  Index iter = 0;
  recorder.record(iter, iter, f, stat, x);

  Status status = Status::running;
  while ((status = stop.check(iter, f, stat, counters, iter)) == Status::running) {
    if (stat == 0.0) {
      status = Status::converged;
      break;
    }
    x += d;
    ++counters.fevals;
    r = obj.residual(x, counters);
    f = obj.value_from_residual(r, x);
    d = ssf_from_correlation(obj, x, obj.op().adjoint(r, counters), c);
    stat = d.lpNorm<Eigen::Infinity>();
    ++iter;
    recorder.record(iter, iter, f, stat, x);
  }
  trace.status = status;
  out.x = std::move(x);
  return out;
}

namespace {

enum class DescentRule { steepest, polak_ribiere };

SolveResult run_descent(const Objective& obj, const Vector& x0, const DescentConfig& config,
                        const RunOptions& options, DescentRule rule) {
  const bool exact = config.line_search == LineSearchMode::exact_quadratic;
  if (exact && !obj.capabilities().has(Capability::hvp))
    throw Error("exact line search needs an HVP");
  SolveResult out;
  Trace& trace = out.trace;
  set_headers(trace, rule == DescentRule::steepest ? "steepest_descent" : "nonlinear_cg",
              std::string("line_search=") + (exact ? "exact_quadratic" : "armijo"), obj.name(),
              "iterations");
  Counters counters;
  TraceRecorder recorder(trace, options, counters);
  StopRule stop(config.stop, options);

  Vector x = x0;
  Vector g;
  double f = obj.value_and_gradient(x, g, counters);
  Vector d = -g;
  double t_prev = 0.0;
  double slope_prev = 0.0;
  Index iter = 0;
  // Steps that lower neither f nor the best gradient norm so far.
  int flat_steps = 0;
  double best_grad = g.norm();
  recorder.record(iter, iter, f, g.norm(), x);

  Status status = Status::running;
  while ((status = stop.check(iter, f, g.norm(), counters, iter)) == Status::running) {
    if (flat_steps >= 10) {
      trace.events.push_back("iter " + std::to_string(iter) + ": no progress in 10 steps");
      status = Status::stalled;
      break;
    }
    const double slope = g.dot(d);
    double t = 0.0;
    if (exact) {
      const double curv = d.dot(obj.hvp(x, d, counters));
      if (!(curv > 0.0)) {
        trace.events.push_back("iter " + std::to_string(iter) + ": nonpositive curvature");
        status = Status::failed;
        break;
      }
      t = -slope / curv;
      x += t * d;
    } else {
      double t0 = 1.0;
      if (iter == 0) t0 = std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>());
      else if (rule == DescentRule::steepest) t0 = 2.0 * t_prev;
      else t0 = std::min(1.0, 1.01 * 2.0 * t_prev * slope_prev / slope);
      if (!(t0 > 0.0) || !std::isfinite(t0)) t0 = 1.0;
      try {
        t = line_search_backtracking(obj, x, d, f, g, counters, 1e-4, 0.5, t0).step;
      } catch (const Error& e) {
        trace.events.push_back("iter " + std::to_string(iter) + ": " + e.what());
        status = Status::failed;
        break;
      }
      x += t * d;
    }
    Vector g_new;
    const double f_old = f;
    f = obj.value_and_gradient(x, g_new, counters);
    const double grad_norm = g_new.norm();
    flat_steps = (f < f_old || grad_norm < best_grad) ? 0 : flat_steps + 1;
    best_grad = std::min(best_grad, grad_norm);
    if (rule == DescentRule::steepest) {
      d = -g_new;
    } else {
      const double beta = std::max(0.0, g_new.dot(g_new - g) / g.squaredNorm());
      d = -g_new + beta * d;
      if (!(g_new.dot(d) < 0.0)) d = -g_new;
    }
    g = std::move(g_new);
    t_prev = t;
    slope_prev = slope;
    ++iter;
    recorder.record(iter, iter, f, g.norm(), x);
  }
  trace.status = status;
  out.x = std::move(x);
  return out;
}

}  // namespace

SolveResult run_steepest_descent(const Objective& obj, const Vector& x0,
                                 const DescentConfig& config, const RunOptions& options) {
  return run_descent(obj, x0, config, options, DescentRule::steepest);
}

SolveResult run_nonlinear_cg(const Objective& obj, const Vector& x0, const DescentConfig& config,
                             const RunOptions& options) {
  return run_descent(obj, x0, config, options, DescentRule::polak_ribiere);
}

}  // namespace sesop
