#pragma once

#include "sesop/objective.hpp"
#include "sesop/trace.hpp"

#include <functional>

namespace sesop {

/// v -> H v for a symmetric positive semidefinite H.
using SpdApply = std::function<Vector(const Vector&)>;

struct LinearCgOptions {
  double tol = 1e-10;  ///< stop at ||r|| <= tol * ||r_0||
  Index max_iter = 100000;
  /// Stop once f - f_opt <= f_tol (needs RunOptions::f_opt).
  std::optional<double> f_tol;
};

/// Linear conjugate gradients for H x = b. Rows report
/// f = 1/2 x^T H x - b^T x (updated by recurrence) and ||H x - b||; every
/// application of H is counted as one hvp. Stops with Status::failed and an
/// event on breakdown (p^T H p <= 0).
SolveResult run_linear_cg(const SpdApply& apply, const Vector& b, const Vector& x0,
                          const LinearCgOptions& cg, const RunOptions& options = {});

/// Linear CG on the Newton system of a quadratic objective, started at x0,
/// so iterate k is the k-th CG point for minimizing obj. f is evaluated
/// exactly at each iterate on a side counter, so the reported matvecs cover
/// only the CG work itself.
SolveResult run_linear_cg(const Objective& quadratic, const Vector& x0, const LinearCgOptions& cg,
                          const RunOptions& options = {});

struct ProximalConfig {
  /// Majorization constant; <= 0 means obj.ssf_constant().
  double c = 0.0;
  StopCriteria stop;
  /// FISTA only: reject a step that increases f and reset the momentum.
  bool restart = false;
};

/// Accelerated proximal gradient with constant step 1/c. Two operator
/// applications per iteration (A y is formed by linearity). Stationarity is
/// ||x_{k+1} - y_k||_inf.
SolveResult run_fista(const CompositeObjective& obj, const Vector& x0,
                      const ProximalConfig& config = {}, const RunOptions& options = {});

/// x_{k+1} = x_k + dir_ssf(x_k) (ISTA). Stationarity is ||dir_ssf||_inf.
SolveResult run_ssf_iteration(const CompositeObjective& obj, const Vector& x0,
                              const ProximalConfig& config = {}, const RunOptions& options = {});

enum class LineSearchMode {
  armijo,
  /// t = -g^T d / d^T H d using one Hessian-vector product; exact on quadratics.
  exact_quadratic,
};

struct DescentConfig {
  LineSearchMode line_search = LineSearchMode::armijo;
  StopCriteria stop;
};

SolveResult run_steepest_descent(const Objective& obj, const Vector& x0,
                                 const DescentConfig& config = {}, const RunOptions& options = {});

/// Polak-Ribiere+ nonlinear CG, restarting with -g whenever the new
/// direction is not a descent direction.
SolveResult run_nonlinear_cg(const Objective& obj, const Vector& x0,
                             const DescentConfig& config = {}, const RunOptions& options = {});

}  // namespace sesop
