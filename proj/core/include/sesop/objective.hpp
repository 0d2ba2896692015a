#pragma once

#include "sesop/linear_operator.hpp"
#include "sesop/types.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace sesop {

enum class Capability : unsigned {
  gradient = 1u << 0,
  hvp = 1u << 1,
  hessian_solve = 1u << 2,
  composite = 1u << 3,
};

class Capabilities {
public:
  constexpr Capabilities() = default;
  constexpr Capabilities(std::initializer_list<Capability> caps) {
    for (Capability c : caps) bits_ |= static_cast<unsigned>(c);
  }
  constexpr bool has(Capability c) const { return (bits_ & static_cast<unsigned>(c)) != 0; }
  constexpr Capabilities& add(Capability c) {
    bits_ |= static_cast<unsigned>(c);
    return *this;
  }

private:
  unsigned bits_ = 0;
};

class CompositeObjective;

/// Smooth (or composite) objective f: R^dim -> R.
///
/// Implementations are immutable after construction. Every call records its
/// cost in the caller's Counters: value -> fevals, gradient -> gevals,
/// hvp -> hvps, plus matvecs for any operator applications inside.
class Objective {
public:
  virtual ~Objective() = default;

  virtual Index dim() const = 0;
  virtual Capabilities capabilities() const = 0;
  virtual std::string name() const = 0;

  virtual double value(const Vector& x, Counters& counters) const = 0;
  virtual Vector gradient(const Vector& x, Counters& counters) const;

  /// Value and gradient at the same point. Objectives that share work
  /// between the two override this.
  virtual double value_and_gradient(const Vector& x, Vector& grad, Counters& counters) const;

  /// Hessian-vector product H(x) v.
  virtual Vector hvp(const Vector& x, const Vector& v, Counters& counters) const;

  /// H(x)^{-1} rhs, or nullopt when H(x) is not positive definite.
  virtual std::optional<Vector> hessian_solve(const Vector& x, const Vector& rhs,
                                              Counters& counters) const;

  virtual const CompositeObjective* composite() const { return nullptr; }
};

inline double soft_threshold(double v, double tau) {
  const double mag = std::abs(v) - tau;
  return mag > 0.0 ? std::copysign(mag, v) : 0.0;
}

/// |t| ~ sqrt(t^2 + eps^2) - eps and its first two derivatives.
inline double smooth_abs(double t, double eps) {
  return std::sqrt(t * t + eps * eps) - eps;
}
inline double smooth_abs_d1(double t, double eps) {
  if (eps == 0.0) return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
  return t / std::sqrt(t * t + eps * eps);
}
inline double smooth_abs_d2(double t, double eps) {
  if (eps == 0.0) return 0.0;
  const double s = t * t + eps * eps;
  return eps * eps / (s * std::sqrt(s));
}

/// f(x) = ||A x - b||^2 + mu ||x||_1.
///
/// value() always reports the exact objective. gradient() and hvp() are
/// those of the smoothed surrogate where |t| is replaced by smooth_abs(t, eps);
/// with mu = 0 they are exact. A Hessian solve is offered when mu = 0 and A is
/// a dense matrix with full column rank (rows >= cols).
class CompositeObjective final : public Objective {
public:
  static constexpr double kDefaultSmoothing = 1e-8;
  static constexpr double kMajorizerSafety = 1.01;
  static constexpr int kPowerIterations = 50;

  CompositeObjective(std::shared_ptr<const LinearOperator> op, Vector b, double mu,
                     double smoothing_eps = kDefaultSmoothing);

  Index dim() const override { return op_->cols(); }
  Capabilities capabilities() const override { return caps_; }
  std::string name() const override { return "composite_l2_l1"; }

  double value(const Vector& x, Counters& counters) const override;
  Vector gradient(const Vector& x, Counters& counters) const override;
  double value_and_gradient(const Vector& x, Vector& grad, Counters& counters) const override;
  Vector hvp(const Vector& x, const Vector& v, Counters& counters) const override;
  std::optional<Vector> hessian_solve(const Vector& x, const Vector& rhs,
                                      Counters& counters) const override;
  const CompositeObjective* composite() const override { return this; }

  const LinearOperator& op() const { return *op_; }
  std::shared_ptr<const LinearOperator> op_ptr() const { return op_; }
  const Vector& b() const { return b_; }
  double mu() const { return mu_; }
  double smoothing_eps() const { return eps_; }

  /// r = A x - b (one matvec).
  Vector residual(const Vector& x, Counters& counters) const;

  /// Exact objective from a precomputed residual.
  double value_from_residual(const Vector& r, const Vector& x) const;
  double smoothed_value_from_residual(const Vector& r, const Vector& x) const;
  double smoothed_value(const Vector& x, Counters& counters) const;

  /// Smoothed gradient 2 A^T r + mu * smooth_abs'(x) given A^T r.
  Vector gradient_from_correlation(const Vector& atr, const Vector& x) const;

  /// Majorization constant c = 1.01 * sigma_hat^2, sigma_hat^2 from 50
  /// power iterations on A^T A at construction.
  double ssf_constant() const { return ssf_constant_; }

  /// ||a_j||^2; throws if the operator cannot provide them.
  const Vector& column_norms_sq() const;

private:
  std::shared_ptr<const LinearOperator> op_;
  Vector b_;
  double mu_;
  double eps_;
  double ssf_constant_ = 0.0;
  std::optional<Vector> column_norms_sq_;
  Capabilities caps_;

  // Lazily factored R of A = QR for the mu = 0 Hessian solve.
  mutable std::once_flag factor_once_;
  mutable Matrix r_factor_;
};

/// View of a CompositeObjective whose value() is the smoothed surrogate, so
/// value, gradient and hvp are mutually consistent.
class SmoothedComposite final : public Objective {
public:
  explicit SmoothedComposite(const CompositeObjective& base) : base_(base) {}

  Index dim() const override { return base_.dim(); }
  Capabilities capabilities() const override {
    return {Capability::gradient, Capability::hvp};
  }
  std::string name() const override { return "smoothed_" + base_.name(); }
  double value(const Vector& x, Counters& counters) const override {
    return base_.smoothed_value(x, counters);
  }
  Vector gradient(const Vector& x, Counters& counters) const override {
    return base_.gradient(x, counters);
  }
  Vector hvp(const Vector& x, const Vector& v, Counters& counters) const override {
    return base_.hvp(x, v, counters);
  }

private:
  const CompositeObjective& base_;
};

/// Central-difference gradient check.
///
/// Returns max_j |fd_j - g_j| / (1 + |g_j|). Throws Error("non-finite
/// objective") if any probe value is not finite.
double check_gradient(const Objective& obj, const Vector& x, double h);

}  // namespace sesop
