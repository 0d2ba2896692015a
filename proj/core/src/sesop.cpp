#include "sesop/sesop.hpp"

#include "sesop/directions.hpp"
#include "sesop/text.hpp"

#include <cmath>
#include <sstream>

namespace sesop {

std::string to_string(FirstDirection d) {
  switch (d) {
    case FirstDirection::gradient: return "gradient";
    case FirstDirection::pcd: return "pcd";
    case FirstDirection::ssf: return "ssf";
    case FirstDirection::newton: return "newton";
  }
  return "unknown";
}

namespace {

std::string describe(const SesopConfig& c) {
  std::ostringstream s;
  s << "first=" << to_string(c.first) << ",M=" << c.history << ",orth=" << (c.include_orth ? 1 : 0)
    << ",cache=" << (c.cache_products ? 1 : 0) << ",inner_tol=" << format_double(c.inner.tol)
    << ",max_inner=" << c.inner.max_inner;
  return s.str();
}

}  // namespace

SolveResult run_sesop(const Objective& obj, const Vector& x0, const SesopConfig& config,
                      const RunOptions& options) {
  const CompositeObjective* comp = obj.composite();
  if ((config.first == FirstDirection::pcd || config.first == FirstDirection::ssf) && !comp)
    throw Error("sesop: pcd/ssf directions need a composite objective");
  if (config.first == FirstDirection::newton &&
      !obj.capabilities().has(Capability::hessian_solve))
    throw Error("sesop: newton direction needs a Hessian solve");
  if (config.history < 0) throw Error("sesop: history depth must be >= 0");
  if (x0.size() != obj.dim()) throw Error("sesop: x0 has wrong length");

  SolveResult out;
  Trace& trace = out.trace;
  Counters counters;
  TraceRecorder recorder(trace, options, counters);
  StopRule stop(config.stop, options);
  trace.set_header("solver", config.first == FirstDirection::newton ? "sesop_newton" : "sesop");
  trace.set_header("solver_config", describe(config));
  trace.set_header("objective", obj.name());
  trace.set_header("cum_steps_axis", "inner subspace Newton iterations");

  Vector x = x0;
  double f = 0.0;
  Vector g;    // smooth gradient (smoothed for composite objectives)
  Vector r;    // composite residual A x - b
  Vector atr;  // A^T r
  Vector r0;
  const double c_major = comp ? comp->ssf_constant() : 0.0;

  auto refresh_composite = [&] {
    atr = comp->op().adjoint(r, counters);
    g = comp->gradient_from_correlation(atr, x);
  };
  if (comp) {
    ++counters.fevals;
    r = comp->residual(x, counters);
    f = comp->value_from_residual(r, x);
    refresh_composite();
    r0 = r;
  } else {
    f = obj.value_and_gradient(x, g, counters);
  }
  auto stationarity = [&] {
    if (comp) return ssf_from_correlation(*comp, x, atr, c_major).lpNorm<Eigen::Infinity>();
    return g.norm();
  };

  HistoryBuffer history(config.history);
  ResidualCheck check;
  OrthState orth(x0);
  ImageMap image_map;
  if (comp) image_map = [&](const Vector& v) { return comp->op().apply(v, counters); };
  FrameOptions frame_options;
  frame_options.history_steps = config.history;
  frame_options.drop_tol = config.drop_tol;
  frame_options.reuse_images = config.cache_products;

  Index iter = 0;
  std::int64_t inner_steps = 0;
  double stat = stationarity();
  recorder.record(iter, inner_steps, f, stat, x);

  Status status = Status::running;
  while ((status = stop.check(iter, f, stat, counters, inner_steps)) == Status::running) {
    std::vector<FrameColumn> columns;
    const bool wants_gradient_image =
        comp && config.include_orth &&
        (config.first == FirstDirection::gradient || config.first == FirstDirection::newton);
    std::optional<Vector> g_image;
    if (wants_gradient_image) g_image = comp->op().apply(g, counters);
    auto push_gradient = [&] {
      columns.push_back(FrameColumn{
          -g, g_image ? std::optional<Vector>(-*g_image) : std::nullopt, Provenance::gradient});
    };

    switch (config.first) {
      case FirstDirection::gradient:
        push_gradient();
        break;
      case FirstDirection::pcd: {
        Index zero_columns = 0;
        columns.push_back(FrameColumn{pcd_from_correlation(*comp, x, atr, &zero_columns),
                                      std::nullopt, Provenance::pcd});
        if (zero_columns > 0 && iter == 0)
          trace.events.push_back("pcd: " + std::to_string(zero_columns) +
                                 " zero-norm columns skipped");
        break;
      }
      case FirstDirection::ssf:
        columns.push_back(
            FrameColumn{ssf_from_correlation(*comp, x, atr, c_major), std::nullopt, Provenance::ssf});
        break;
      case FirstDirection::newton:
        try {
          columns.push_back(
              FrameColumn{dir_newton(obj, x, g, counters), std::nullopt, Provenance::newton});
        } catch (const NewtonUnavailable&) {
          trace.events.push_back("iter " + std::to_string(iter) +
                                 ": newton direction unavailable, gradient frame");
        }
        push_gradient();
        break;
    }

    if (config.include_orth) {
      std::optional<Vector> total_image;
      if (comp) total_image = r - r0;
      OrthState::Directions od = orth.update(g, x, g_image);
      columns.push_back(FrameColumn{std::move(od.weighted_grad), std::move(od.weighted_grad_image),
                                    Provenance::orth_weighted_grad});
      columns.push_back(
          FrameColumn{std::move(od.total_step), std::move(total_image), Provenance::orth_total_step});
    }

    SubspaceFrame frame;
    try {
      frame = build_frame(x, std::move(columns), history, frame_options, image_map);
    } catch (const EmptySubspace&) {
      trace.events.push_back("iter " + std::to_string(iter) + ": empty subspace");
      status = stat == 0.0 ? Status::converged : Status::failed;
      break;
    }

    BasePoint base;
    base.f = f;
    if (comp) base.residual = r;
    else base.gradient = g;
    SubspaceResult sub = subspace_minimize(obj, frame, base, config.inner, counters);
    if (sub.fallback) trace.events.push_back("iter " + std::to_string(iter) + ": " + sub.event);
    inner_steps += sub.inner_iterations;
    if (sub.step.squaredNorm() == 0.0) {
      trace.events.push_back("iter " + std::to_string(iter) + ": no decrease in subspace");
      status = Status::stalled;
      break;
    }

    history.push_step(sub.step, sub.step_image);
    x = std::move(sub.x);
    f = sub.f;
    if (comp) {
      r = std::move(*sub.residual);
      if (check.due()) {
        Vector exact = comp->residual(x, counters);
        check.checked((exact - r).norm() / (exact.norm() + comp->b().norm()));
        r = std::move(exact);
        // Within rounding of each other: keep the value the descent test used.
        const double f_exact = comp->value_from_residual(r, x);
        if (std::abs(f_exact - f) > 1e-12 * std::abs(f)) f = f_exact;
      }
      refresh_composite();
    } else {
      g = std::move(*sub.gradient);
    }
    ++iter;
    stat = stationarity();
    recorder.record(iter, inner_steps, f, stat, x);
  }

  trace.status = status;
  out.x = std::move(x);
  return out;
}

SolveResult run_sesop_newton(const Objective& obj, const Vector& x0, SesopConfig config,
                             const RunOptions& options) {
  config.first = FirstDirection::newton;
  return run_sesop(obj, x0, config, options);
}

}  // namespace sesop
