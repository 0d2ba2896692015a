#include "sesop/linear_operator.hpp"

#include "sesop/rng.hpp"

#include <algorithm>
#include <cmath>

namespace sesop {

Vector LinearOperator::apply(const Vector& x, Counters& counters) const {
  if (x.size() != cols()) throw Error("LinearOperator::apply: dimension mismatch");
  ++counters.matvecs;
  return apply_impl(x);
}

Vector LinearOperator::adjoint(const Vector& y, Counters& counters) const {
  if (y.size() != rows()) throw Error("LinearOperator::adjoint: dimension mismatch");
  ++counters.matvecs;
  return adjoint_impl(y);
}

DenseOperator::DenseOperator(Matrix a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.cols() == 0) throw Error("DenseOperator: empty matrix");
  column_norms_sq_ = a_.colwise().squaredNorm().transpose();
}

Vector DenseOperator::apply_impl(const Vector& x) const {
  Vector y(a_.rows());
  y.noalias() = a_ * x;
  return y;
}

Vector DenseOperator::adjoint_impl(const Vector& y) const {
  Vector x(a_.cols());
  x.noalias() = a_.transpose() * y;
  return x;
}

double adjoint_mismatch(const LinearOperator& op, std::uint64_t seed, int probes) {
  Rng rng(seed);
  Counters scratch;
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Vector u = rng.normal_vector(op.cols());
    const Vector v = rng.normal_vector(op.rows());
    const double lhs = op.apply(u, scratch).dot(v);
    const double rhs = u.dot(op.adjoint(v, scratch));
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

double estimate_largest_singular_value_sq(const LinearOperator& op, int iterations,
                                          Counters& counters) {
  Rng rng(0x5E50'0001ULL);
  Vector v = rng.normal_vector(op.cols());
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = op.adjoint(op.apply(v, counters), counters);
    lambda = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
  }
  return lambda;
}

}  // namespace sesop
