#include "sesop/tn.hpp"

#include "sesop/directions.hpp"
#include "sesop/text.hpp"

#include <cmath>
#include <sstream>

namespace sesop {

double QuadraticModel::value(const Vector& x, Counters& counters) const {
  const Vector s = x - base;
  return f_base + g_base.dot(s) + 0.5 * s.dot(hessian_times(s, counters));
}

Vector QuadraticModel::gradient(const Vector& x, Counters& counters) const {
  return g_base + hessian_times(Vector(x - base), counters);
}

InnerCgState inner_cg(const QuadraticModel& model, const Vector& start, Index l_max,
                      double force_tol, const std::optional<WarmStart2D>& warm,
                      Counters& counters, const std::function<void(Index, const Vector&)>& on_step) {
  InnerCgState st;
  st.x = start;
  st.x_prev = start;
  // r = -grad q(x)
  Vector r = (start == model.base) ? Vector(-model.g_base) : Vector(-model.gradient(start, counters));
  const double target = force_tol * model.g_base.norm();
  if (r.squaredNorm() == 0.0 || l_max <= 0) {
    st.model_gradient = -r;
    return st;
  }

  Vector p, hp;
  double p_curv = 0.0;
  // r^T r at the start of the last standard step; 0 when the last step was
  // the warm step, whose direction is only known up to scale.
  double rr_prev = 0.0;

  if (warm) {
    // Orthonormal basis of the warm-start pair.
    Matrix w(start.size(), 2);
    Index cols = 0;
    for (const Vector* v : {&warm->second, &warm->first}) {
      const double nv = v->norm();
      if (!(nv > 0.0) || !std::isfinite(nv)) continue;
      Vector u = *v / nv;
      for (int pass = 0; pass < 2; ++pass)
        for (Index i = 0; i < cols; ++i) u -= w.col(i).dot(u) * w.col(i);
      const double nu = u.norm();
      if (nu < 1e-10) continue;
      w.col(cols++) = u / nu;
    }
    if (cols > 0) {
      Matrix hw(start.size(), cols);
      for (Index i = 0; i < cols; ++i) hw.col(i) = model.hessian_times(w.col(i), counters);
      Matrix m = w.leftCols(cols).transpose() * hw;
      m = 0.5 * (m + m.transpose()).eval();
      Eigen::LLT<Matrix> llt(m);
      if (llt.info() == Eigen::Success) {
        const Vector a = llt.solve(w.leftCols(cols).transpose() * r);
        p = w.leftCols(cols) * a;
        hp = hw * a;
        p_curv = p.dot(hp);
        st.x_prev = st.x;
        st.x += p;
        r -= hp;
        st.steps = 1;
        st.warm_used = true;
        if (on_step) on_step(st.steps, st.x);
      }
    }
  }

  while (st.steps < l_max && r.norm() > target) {
    if (p.size() == 0) {
      p = r;
    } else {
      const double beta = rr_prev > 0.0 ? r.squaredNorm() / rr_prev : -r.dot(hp) / p_curv;
      p = r + beta * p;
    }
    hp = model.hessian_times(p, counters);
    const double curv = p.dot(hp);
    if (!(curv > 0.0)) {
      st.negative_curvature = true;
      if (st.steps == 0) {
        st.x_prev = st.x;
        st.x += r;
        st.steps = 1;
        // p == r on the first step, so hp = H r.
        st.model_gradient = -r + hp;
        if (on_step) on_step(st.steps, st.x);
        return st;
      }
      break;
    }
    const double alpha = r.dot(p) / curv;
    rr_prev = r.squaredNorm();
    st.x_prev = st.x;
    st.x += alpha * p;
    r -= alpha * hp;
    p_curv = curv;
    ++st.steps;
    if (on_step) on_step(st.steps, st.x);
  }
  st.model_gradient = -r;
  return st;
}

double forcing_term(const TnConfig& config, double grad_norm, double initial_grad_norm) {
  if (config.fixed_force_tol) return *config.fixed_force_tol;
  if (!(initial_grad_norm > 0.0)) return config.force_cap;
  return std::min(config.force_cap, std::sqrt(grad_norm / initial_grad_norm));
}

namespace {

/// Value/gradient bookkeeping shared by the two TN drivers; composite
/// objectives keep their residual so gradients cost one adjoint.
struct OuterPoint {
  const Objective& obj;
  const CompositeObjective* comp;
  Counters& counters;
  Vector x;
  double f = 0.0;
  Vector g;
  Vector r;

  void evaluate() {
    if (comp) {
      ++counters.fevals;
      ++counters.gevals;
      r = comp->residual(x, counters);
      f = comp->value_from_residual(r, x);
      g = comp->gradient_from_correlation(comp->op().adjoint(r, counters), x);
    } else {
      f = obj.value_and_gradient(x, g, counters);
    }
  }
};

std::string describe(const TnConfig& c) {
  std::ostringstream s;
  s << "lmax=" << c.l_max << ",force="
    << (c.fixed_force_tol ? format_double(*c.fixed_force_tol)
                          : "min(" + format_double(c.force_cap) + ",sqrt(|g|/|g0|))");
  return s.str();
}

}  // namespace

SolveResult run_tn_classic(const Objective& obj, const Vector& x0, const TnConfig& config,
                           const RunOptions& options) {
  if (!obj.capabilities().has(Capability::hvp)) throw Error("tn: objective has no HVP");
  SolveResult out;
  Trace& trace = out.trace;
  Counters counters;
  TraceRecorder recorder(trace, options, counters);
  StopRule stop(config.stop, options);
  trace.set_header("solver", "tn");
  trace.set_header("solver_config", describe(config));
  trace.set_header("objective", obj.name());
  trace.set_header("cum_steps_axis", "inner CG steps");

  OuterPoint pt{obj, obj.composite(), counters, x0, 0.0, {}, {}};
  pt.evaluate();
  const double g0 = pt.g.norm();
  Index iter = 0;
  std::int64_t cum = 0;
  recorder.record(iter, cum, pt.f, pt.g.norm(), pt.x);

  Status status = Status::running;
  while ((status = stop.check(iter, pt.f, pt.g.norm(), counters, cum)) == Status::running) {
    const QuadraticModel model{obj, pt.x, pt.f, pt.g};
    const std::int64_t cum_before = cum;
    const InnerCgState inner = inner_cg(
        model, pt.x, config.l_max, forcing_term(config, pt.g.norm(), g0), std::nullopt, counters,
        [&](Index l, const Vector& xi) { recorder.observe(iter, cum_before + l, xi, true); });
    cum += inner.steps;

    Vector d = inner.x - pt.x;
    LineSearchResult ls;
    try {
      ls = line_search_backtracking(obj, pt.x, d, pt.f, pt.g, counters);
    } catch (const Error& e) {
      trace.events.push_back("iter " + std::to_string(iter) + ": " + e.what() +
                             "; steepest descent fallback");
      d = -pt.g;
      try {
        ls = line_search_backtracking(obj, pt.x, d, pt.f, pt.g, counters);
      } catch (const Error& e2) {
        trace.events.push_back("iter " + std::to_string(iter) + ": " + e2.what());
        status = Status::failed;
        break;
      }
    }
    pt.x += ls.step * d;
    pt.evaluate();
    ++iter;
    recorder.record(iter, cum, pt.f, pt.g.norm(), pt.x);
  }
  trace.status = status;
  out.x = std::move(pt.x);
  return out;
}

SolveResult run_sesop_tn(const Objective& obj, const Vector& x0, const SesopTnConfig& config,
                         const RunOptions& options) {
  if (!obj.capabilities().has(Capability::hvp)) throw Error("sesop_tn: objective has no HVP");
  SolveResult out;
  Trace& trace = out.trace;
  Counters counters;
  TraceRecorder recorder(trace, options, counters);
  StopRule stop(config.tn.stop, options);
  trace.set_header("solver", "sesop_tn");
  trace.set_header("solver_config", describe(config.tn) + ",outer_steps=" +
                                        std::to_string(config.outer_steps) +
                                        ",outer_gradients=" +
                                        std::to_string(config.outer_gradients) +
                                        ",warm=" + (config.warm_start ? "1" : "0"));
  trace.set_header("objective", obj.name());
  trace.set_header("cum_steps_axis",
                   "inner CG steps (2D warm step counts 1) + 1 per subspace step");

  const CompositeObjective* comp = obj.composite();
  OuterPoint pt{obj, comp, counters, x0, 0.0, {}, {}};
  pt.evaluate();
  const double g0 = pt.g.norm();

  HistoryBuffer history(std::max(config.outer_steps, config.outer_gradients));
  FrameOptions frame_options;
  frame_options.history_steps = config.outer_steps;
  frame_options.history_gradients = config.outer_gradients;
  frame_options.drop_tol = config.drop_tol;
  ImageMap image_map;
  if (comp) image_map = [&](const Vector& v) { return comp->op().apply(v, counters); };
  ResidualCheck check;

  std::optional<WarmStart2D> warm;
  Index iter = 0;
  std::int64_t cum = 0;
  recorder.record(iter, cum, pt.f, pt.g.norm(), pt.x);

  Status status = Status::running;
  while ((status = stop.check(iter, pt.f, pt.g.norm(), counters, cum)) == Status::running) {
    const QuadraticModel model{obj, pt.x, pt.f, pt.g};
    const std::int64_t cum_before = cum;
    const InnerCgState inner = inner_cg(
        model, pt.x, config.tn.l_max, forcing_term(config.tn, pt.g.norm(), g0),
        config.warm_start ? warm : std::nullopt, counters,
        [&](Index l, const Vector& xi) { recorder.observe(iter, cum_before + l, xi, true); });
    cum += inner.steps;

    std::vector<FrameColumn> columns;
    if (inner.steps >= 1) {
      columns.push_back(FrameColumn{inner.x - pt.x, std::nullopt, Provenance::tn_direction});
      columns.push_back(FrameColumn{inner.model_gradient, std::nullopt, Provenance::model_gradient});
      columns.push_back(FrameColumn{inner.x - inner.x_prev, std::nullopt, Provenance::cg_step});
    } else {
      columns.push_back(FrameColumn{-pt.g, std::nullopt, Provenance::gradient});
    }

    SubspaceFrame frame;
    try {
      frame = build_frame(pt.x, std::move(columns), history, frame_options, image_map);
    } catch (const EmptySubspace&) {
      trace.events.push_back("iter " + std::to_string(iter) + ": empty subspace");
      status = Status::failed;
      break;
    }
    BasePoint base;
    base.f = pt.f;
    if (comp) base.residual = pt.r;
    else base.gradient = pt.g;
    SubspaceResult sub = subspace_minimize(obj, frame, base, config.inner, counters);
    if (sub.fallback) trace.events.push_back("iter " + std::to_string(iter) + ": " + sub.event);
    ++cum;
    if (sub.step.squaredNorm() == 0.0) {
      trace.events.push_back("iter " + std::to_string(iter) + ": no decrease in subspace");
      status = Status::stalled;
      break;
    }

    history.push_step(sub.step, sub.step_image);
    history.push_gradient(pt.g);
    pt.x = std::move(sub.x);
    pt.f = sub.f;
    if (comp) {
      ++counters.gevals;
      pt.r = std::move(*sub.residual);
      if (check.due()) {
        Vector exact = comp->residual(pt.x, counters);
        check.checked((exact - pt.r).norm() / (exact.norm() + comp->b().norm()));
        pt.r = std::move(exact);
        // Within rounding of each other: keep the value the descent test used.
        const double f_exact = comp->value_from_residual(pt.r, pt.x);
        if (std::abs(f_exact - pt.f) > 1e-12 * std::abs(pt.f)) pt.f = f_exact;
      }
      pt.g = comp->gradient_from_correlation(comp->op().adjoint(pt.r, counters), pt.x);
    } else {
      pt.g = std::move(*sub.gradient);
    }
    warm = WarmStart2D{pt.x - inner.x, pt.g};
    ++iter;
    recorder.record(iter, cum, pt.f, pt.g.norm(), pt.x);
  }
  trace.status = status;
  out.x = std::move(pt.x);
  return out;
}

}  // namespace sesop
