#pragma once

#include "sesop/objective.hpp"
#include "sesop/subspace.hpp"
#include "sesop/trace.hpp"

#include <functional>
#include <optional>

namespace sesop {

/// q(x) = f(x_k) + g_k^T (x - x_k) + 1/2 (x - x_k)^T H_k (x - x_k), with H_k
/// available only through Hessian-vector products at x_k.
struct QuadraticModel {
  const Objective& objective;
  Vector base;
  double f_base = 0.0;
  Vector g_base;

  double value(const Vector& x, Counters& counters) const;
  Vector gradient(const Vector& x, Counters& counters) const;
  Vector hessian_times(const Vector& v, Counters& counters) const {
    return objective.hvp(base, v, counters);
  }
};

/// Pair of vectors whose span hosts the first step of a warm-started
/// inner CG run.
struct WarmStart2D {
  Vector first;
  Vector second;
};

struct InnerCgState {
  Vector x;       ///< last inner iterate x^{k,l}
  Vector x_prev;  ///< x^{k,l-1}
  Vector model_gradient;  ///< grad q(x^{k,l})
  Index steps = 0;        ///< l
  bool negative_curvature = false;
  bool warm_used = false;
};

/// Conjugate gradients on the model, starting at `start`, for at most l_max
/// steps or until ||grad q|| <= force_tol * ||g_k||.
///
/// Each standard step costs one Hessian-vector product. Search directions
/// are made H-conjugate to the previous step. The first step after the warm
/// step uses beta = -r^T H p / p^T H p, which does not depend on the scale of
/// p; later steps use the usual ratio of squared residuals. With a warm
/// start the first step is the exact model minimizer over start +
/// span(warm.first, warm.second) (two products) and counts as one step. On
/// negative curvature the current iterate is returned; if that happens on
/// the first step the returned iterate is start - grad q(start).
InnerCgState inner_cg(const QuadraticModel& model, const Vector& start, Index l_max,
                      double force_tol, const std::optional<WarmStart2D>& warm,
                      Counters& counters,
                      const std::function<void(Index, const Vector&)>& on_step = {});

struct TnConfig {
  Index l_max = 10;
  /// Forcing term min(force_cap, sqrt(||g_k|| / ||g_0||)); a fixed value
  /// replaces the schedule when set.
  double force_cap = 0.5;
  std::optional<double> fixed_force_tol;
  StopCriteria stop;
};

struct SesopTnConfig {
  TnConfig tn;
  Index outer_steps = 2;      ///< previous outer steps added to S_k
  Index outer_gradients = 1;  ///< previous gradients of f added to S_k
  bool warm_start = true;
  InnerOptions inner;
  double drop_tol = 1e-10;
};

/// Forcing term for outer iteration k.
double forcing_term(const TnConfig& config, double grad_norm, double initial_grad_norm);

/// Line-search truncated Newton. The cum_steps column counts inner CG steps.
SolveResult run_tn_classic(const Objective& obj, const Vector& x0, const TnConfig& config,
                           const RunOptions& options = {});

/// Truncated Newton whose outer line search is replaced by minimization over
/// S_k = x_k + span{x^{k,l} - x_k, grad q_k(x^{k,l}), x^{k,l} - x^{k,l-1},
/// previous outer steps, previous gradients}; the next inner run starts with
/// the exact model step over span{x_{k+1} - x^{k,l}, grad f(x_{k+1})}.
///
/// The cum_steps column counts inner CG steps plus one per subspace step,
/// so on a quadratic each unit of the axis is one step of the global CG
/// sequence.
SolveResult run_sesop_tn(const Objective& obj, const Vector& x0, const SesopTnConfig& config,
                         const RunOptions& options = {});

}  // namespace sesop
