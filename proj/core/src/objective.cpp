#include "sesop/objective.hpp"

#include <algorithm>
#include <cmath>

namespace sesop {

Vector Objective::gradient(const Vector&, Counters&) const {
  throw Error(name() + ": gradient not available");
}

double Objective::value_and_gradient(const Vector& x, Vector& grad, Counters& counters) const {
  grad = gradient(x, counters);
  return value(x, counters);
}

Vector Objective::hvp(const Vector&, const Vector&, Counters&) const {
  throw Error(name() + ": Hessian-vector product not available");
}

std::optional<Vector> Objective::hessian_solve(const Vector&, const Vector&, Counters&) const {
  throw Error(name() + ": Hessian solve not available");
}

CompositeObjective::CompositeObjective(std::shared_ptr<const LinearOperator> op, Vector b,
                                       double mu, double smoothing_eps)
    : op_(std::move(op)), b_(std::move(b)), mu_(mu), eps_(smoothing_eps) {
  if (!op_) throw Error("CompositeObjective: null operator");
  if (b_.size() != op_->rows()) throw Error("CompositeObjective: b has wrong length");
  if (!(mu_ >= 0.0)) throw Error("CompositeObjective: mu must be nonnegative");
  if (!(eps_ >= 0.0)) throw Error("CompositeObjective: smoothing must be nonnegative");

  column_norms_sq_ = op_->column_norms_sq();

  Counters build;
  ssf_constant_ =
      kMajorizerSafety * estimate_largest_singular_value_sq(*op_, kPowerIterations, build);

  caps_ = {Capability::gradient, Capability::hvp, Capability::composite};
  if (mu_ == 0.0 && op_->dense() != nullptr && op_->rows() >= op_->cols())
    caps_.add(Capability::hessian_solve);
}

Vector CompositeObjective::residual(const Vector& x, Counters& counters) const {
  Vector r = op_->apply(x, counters);
  r -= b_;
  return r;
}

double CompositeObjective::value_from_residual(const Vector& r, const Vector& x) const {
  return r.squaredNorm() + mu_ * x.lpNorm<1>();
}

double CompositeObjective::smoothed_value_from_residual(const Vector& r, const Vector& x) const {
  double l1 = 0.0;
  if (mu_ != 0.0)
    for (Index j = 0; j < x.size(); ++j) l1 += smooth_abs(x[j], eps_);
  return r.squaredNorm() + mu_ * l1;
}

double CompositeObjective::value(const Vector& x, Counters& counters) const {
  ++counters.fevals;
  return value_from_residual(residual(x, counters), x);
}

double CompositeObjective::smoothed_value(const Vector& x, Counters& counters) const {
  ++counters.fevals;
  return smoothed_value_from_residual(residual(x, counters), x);
}

Vector CompositeObjective::gradient_from_correlation(const Vector& atr, const Vector& x) const {
  Vector g = 2.0 * atr;
  if (mu_ != 0.0)
    for (Index j = 0; j < x.size(); ++j) g[j] += mu_ * smooth_abs_d1(x[j], eps_);
  return g;
}

Vector CompositeObjective::gradient(const Vector& x, Counters& counters) const {
  ++counters.gevals;
  return gradient_from_correlation(op_->adjoint(residual(x, counters), counters), x);
}

double CompositeObjective::value_and_gradient(const Vector& x, Vector& grad,
                                              Counters& counters) const {
  ++counters.fevals;
  ++counters.gevals;
  const Vector r = residual(x, counters);
  grad = gradient_from_correlation(op_->adjoint(r, counters), x);
  return value_from_residual(r, x);
}

Vector CompositeObjective::hvp(const Vector& x, const Vector& v, Counters& counters) const {
  ++counters.hvps;
  Vector hv = 2.0 * op_->adjoint(op_->apply(v, counters), counters);
  if (mu_ != 0.0)
    for (Index j = 0; j < x.size(); ++j) hv[j] += mu_ * smooth_abs_d2(x[j], eps_) * v[j];
  return hv;
}

std::optional<Vector> CompositeObjective::hessian_solve(const Vector&, const Vector& rhs,
                                                        Counters&) const {
  if (!caps_.has(Capability::hessian_solve)) throw Error(name() + ": Hessian solve not available");
  std::call_once(factor_once_, [this] {
    Eigen::HouseholderQR<Matrix> qr(*op_->dense());
    r_factor_ = qr.matrixQR().topRows(op_->cols()).triangularView<Eigen::Upper>();
  });
  const auto diag = r_factor_.diagonal().cwiseAbs();
  if (diag.minCoeff() <= 1e-14 * diag.maxCoeff()) return std::nullopt;
  // H = 2 A^T A = 2 R^T R.
  Vector y = r_factor_.transpose().triangularView<Eigen::Lower>().solve(0.5 * rhs);
  r_factor_.triangularView<Eigen::Upper>().solveInPlace(y);
  return y;
}

const Vector& CompositeObjective::column_norms_sq() const {
  if (!column_norms_sq_) throw Error("operator does not provide column norms");
  return *column_norms_sq_;
}

double check_gradient(const Objective& obj, const Vector& x, double h) {
  if (!(h > 0.0)) throw Error("check_gradient: step must be positive");
  Counters counters;
  const Vector g = obj.gradient(x, counters);
  Vector probe = x;
  double worst = 0.0;
  for (Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double fp = obj.value(probe, counters);
    probe[j] = x[j] - h;
    const double fm = obj.value(probe, counters);
    probe[j] = x[j];
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw Error("non-finite objective");
    const double fd = (fp - fm) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[j]) / (1.0 + std::abs(g[j])));
  }
  return worst;
}

}  // namespace sesop
