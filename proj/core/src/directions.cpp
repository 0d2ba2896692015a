#include "sesop/directions.hpp"

#include <cmath>

namespace sesop {

std::string to_string(DirectionKind kind) {
  switch (kind) {
    case DirectionKind::gradient: return "gradient";
    case DirectionKind::pcd: return "pcd";
    case DirectionKind::ssf: return "ssf";
    case DirectionKind::orth_weighted_grad: return "orth_weighted_grad";
    case DirectionKind::orth_total_step: return "orth_total_step";
    case DirectionKind::newton: return "newton";
    case DirectionKind::tn: return "tn";
  }
  return "unknown";
}

Vector dir_gradient(const Vector& grad) { return -grad; }

Vector pcd_from_correlation(const CompositeObjective& obj, const Vector& x, const Vector& atr,
                            Index* zero_columns) {
  const Vector& norms = obj.column_norms_sq();
  const double mu = obj.mu();
  Vector d(x.size());
  Index zeros = 0;
  for (Index j = 0; j < x.size(); ++j) {
    const double a2 = norms[j];
    if (a2 <= 0.0) {
      d[j] = 0.0;
      ++zeros;
      continue;
    }
    d[j] = soft_threshold(x[j] - atr[j] / a2, mu / (2.0 * a2)) - x[j];
  }
  if (zero_columns) *zero_columns = zeros;
  return d;
}

Vector dir_pcd(const CompositeObjective& obj, const Vector& x, const Vector& r, Counters& counters,
               Index* zero_columns) {
  return pcd_from_correlation(obj, x, obj.op().adjoint(r, counters), zero_columns);
}

Vector ssf_from_correlation(const CompositeObjective& obj, const Vector& x, const Vector& atr,
                            double c) {
  if (!(c > 0.0)) throw Error("invalid majorizer");
  const double tau = obj.mu() / (2.0 * c);
  Vector d(x.size());
  for (Index j = 0; j < x.size(); ++j) d[j] = soft_threshold(x[j] - atr[j] / c, tau) - x[j];
  return d;
}

Vector dir_ssf(const CompositeObjective& obj, const Vector& x, const Vector& r, double c,
               Counters& counters) {
  if (!(c > 0.0)) throw Error("invalid majorizer");
  return ssf_from_correlation(obj, x, obj.op().adjoint(r, counters), c);
}

Vector dir_newton(const Objective& obj, const Vector& x, const Vector& grad, Counters& counters) {
  if (grad.squaredNorm() == 0.0) return Vector::Zero(grad.size());
  if (!obj.capabilities().has(Capability::hessian_solve)) throw NewtonUnavailable();
  std::optional<Vector> step = obj.hessian_solve(x, grad, counters);
  if (!step || !step->allFinite()) throw NewtonUnavailable();
  Vector d = -*step;
  if (!(grad.dot(d) < 0.0)) throw NewtonUnavailable();
  return d;
}

OrthState::Directions OrthState::update(const Vector& grad, const Vector& x,
                                        const std::optional<Vector>& grad_image) {
  weight_ = count_ == 0 ? 1.0 : next_weight(weight_);
  ++count_;
  weighted_sum_ += weight_ * grad;
  if (grad_image && images_valid_) {
    if (!weighted_sum_image_) weighted_sum_image_ = Vector::Zero(grad_image->size());
    *weighted_sum_image_ += weight_ * *grad_image;
  } else {
    images_valid_ = false;
    weighted_sum_image_.reset();
  }

  Directions out;
  const double norm = weighted_sum_.norm();
  if (norm > 0.0) {
    out.weighted_grad = -weighted_sum_ / norm;
    if (weighted_sum_image_) out.weighted_grad_image = -*weighted_sum_image_ / norm;
  } else {
    out.weighted_grad = Vector::Zero(x.size());
  }
  out.total_step = x - x0_;
  return out;
}

double composite_directional_derivative(const CompositeObjective& obj, const Vector& x,
                                        const Vector& atr, const Vector& d) {
  double deriv = 2.0 * atr.dot(d);
  const double mu = obj.mu();
  if (mu != 0.0) {
    for (Index j = 0; j < x.size(); ++j) {
      if (x[j] > 0.0) deriv += mu * d[j];
      else if (x[j] < 0.0) deriv -= mu * d[j];
      else deriv += mu * std::abs(d[j]);
    }
  }
  return deriv;
}

}  // namespace sesop
