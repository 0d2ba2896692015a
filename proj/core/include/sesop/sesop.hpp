#pragma once

#include "sesop/objective.hpp"
#include "sesop/subspace.hpp"
#include "sesop/trace.hpp"

#include <string>

namespace sesop {

/// Direction placed in the first frame column every iteration.
enum class FirstDirection { gradient, pcd, ssf, newton };

std::string to_string(FirstDirection d);

struct SesopConfig {
  FirstDirection first = FirstDirection::gradient;
  /// Also add the two ORTH columns (weighted gradient sum, total step).
  bool include_orth = false;
  /// M, number of previous steps kept in the frame.
  Index history = 7;
  /// Reuse cached A * d products across iterations (composite objectives).
  bool cache_products = true;
  InnerOptions inner;
  double drop_tol = 1e-10;
  StopCriteria stop;
};

/// Sequential subspace optimization.
///
/// Each iteration minimizes f over x_k + span{first direction, [-g for the
/// Newton variant], last M steps, [ORTH columns]} and pushes the accepted
/// step into the history. For composite objectives the residual and all
/// column images are carried along, so an iteration costs one adjoint (for
/// A^T r) plus one forward product per new column.
///
/// Stationarity is ||g|| for smooth objectives and ||d_ssf||_inf for
/// composite ones.
SolveResult run_sesop(const Objective& obj, const Vector& x0, const SesopConfig& config,
                      const RunOptions& options = {});

/// SESOP with frame {Newton direction, -gradient, M previous steps}. When the
/// Newton direction is unavailable the iteration degrades to plain SESOP
/// and an event is recorded.
SolveResult run_sesop_newton(const Objective& obj, const Vector& x0, SesopConfig config,
                             const RunOptions& options = {});

}  // namespace sesop
