#pragma once

#include "sesop/objective.hpp"
#include "sesop/types.hpp"

#include <optional>
#include <string>
#include <utility>

namespace sesop {

enum class DirectionKind { gradient, pcd, ssf, orth_weighted_grad, orth_total_step, newton, tn };

std::string to_string(DirectionKind kind);

/// -g.
Vector dir_gradient(const Vector& grad);

/// Parallel coordinate descent direction for ||Ax - b||^2 + mu ||x||_1:
/// d_j = soft(x_j - a_j^T r / ||a_j||^2, mu / (2 ||a_j||^2)) - x_j.
///
/// Uses one adjoint application. Coordinates with a zero column get d_j = 0;
/// their count is written to zero_columns when given.
Vector dir_pcd(const CompositeObjective& obj, const Vector& x, const Vector& r, Counters& counters,
               Index* zero_columns = nullptr);

/// Same as dir_pcd with A^T r already available.
Vector pcd_from_correlation(const CompositeObjective& obj, const Vector& x, const Vector& atr,
                            Index* zero_columns = nullptr);

/// Separable surrogate step: x*_j = soft(x_j - (A^T r)_j / c, mu / (2c)), d = x* - x.
/// c must majorize sigma_max(A)^2. Throws Error("invalid majorizer") if c <= 0.
Vector dir_ssf(const CompositeObjective& obj, const Vector& x, const Vector& r, double c,
               Counters& counters);

Vector ssf_from_correlation(const CompositeObjective& obj, const Vector& x, const Vector& atr,
                            double c);

/// Newton direction -H^{-1} g. Throws NewtonUnavailable when the Hessian
/// solve reports a non-positive-definite Hessian or returns a non-descent
/// direction.
Vector dir_newton(const Objective& obj, const Vector& x, const Vector& grad, Counters& counters);

/// Running state of the two ORTH directions: the accumulated weighted
/// gradient sum and the total step from the start point.
///
/// Weights follow w_0 = 1, w_k = 1/2 + sqrt(1/4 + w_{k-1}^2). When images
/// (A times vectors) are supplied the state also accumulates the image of
/// the weighted sum, so composite solvers get it without a matvec.
class OrthState {
public:
  explicit OrthState(Vector x0) : x0_(std::move(x0)), weighted_sum_(Vector::Zero(x0_.size())) {}

  struct Directions {
    Vector weighted_grad;  ///< -sum w_i g_i, normalized (zero if the sum vanishes)
    std::optional<Vector> weighted_grad_image;
    Vector total_step;     ///< x_k - x_0
  };

  /// Adds w_k g_k to the sum and returns both directions at x_k.
  Directions update(const Vector& grad, const Vector& x,
                    const std::optional<Vector>& grad_image = std::nullopt);

  Index updates() const { return count_; }
  double last_weight() const { return weight_; }
  const Vector& weighted_sum() const { return weighted_sum_; }
  const Vector& x0() const { return x0_; }

  static double next_weight(double w) { return 0.5 + std::sqrt(0.25 + w * w); }

private:
  Vector x0_;
  Vector weighted_sum_;
  std::optional<Vector> weighted_sum_image_;
  bool images_valid_ = true;
  double weight_ = 0.0;
  Index count_ = 0;
};

/// f'(x; d) for the exact composite objective (one-sided directional
/// derivative of the L1 term at zero coordinates), given A^T r.
double composite_directional_derivative(const CompositeObjective& obj, const Vector& x,
                                        const Vector& atr, const Vector& d);

}  // namespace sesop
