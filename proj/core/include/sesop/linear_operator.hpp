#pragma once

#include "sesop/types.hpp"

#include <optional>

namespace sesop {

/// Linear map A: R^cols -> R^rows with its adjoint.
///
/// apply() and adjoint() each add exactly one to Counters::matvecs.
class LinearOperator {
public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;

  Vector apply(const Vector& x, Counters& counters) const;
  Vector adjoint(const Vector& y, Counters& counters) const;

  /// Squared Euclidean norms of the columns, if the operator knows them.
  virtual std::optional<Vector> column_norms_sq() const { return std::nullopt; }

  /// Explicit matrix, for operators that are backed by one.
  virtual const Matrix* dense() const { return nullptr; }

protected:
  virtual Vector apply_impl(const Vector& x) const = 0;
  virtual Vector adjoint_impl(const Vector& y) const = 0;
};

/// Operator backed by an explicit dense matrix.
class DenseOperator final : public LinearOperator {
public:
  explicit DenseOperator(Matrix a);

  Index rows() const override { return a_.rows(); }
  Index cols() const override { return a_.cols(); }
  std::optional<Vector> column_norms_sq() const override { return column_norms_sq_; }
  const Matrix* dense() const override { return &a_; }

protected:
  Vector apply_impl(const Vector& x) const override;
  Vector adjoint_impl(const Vector& y) const override;

private:
  Matrix a_;
  Vector column_norms_sq_;
};

/// Largest relative violation of <A u, v> = <u, A^T v> over random probes.
double adjoint_mismatch(const LinearOperator& op, std::uint64_t seed, int probes = 10);

/// Estimate of sigma_max(A)^2 from power iteration on A^T A with a fixed
/// seeded start vector. Costs 2 * iterations operator applications.
double estimate_largest_singular_value_sq(const LinearOperator& op, int iterations,
                                          Counters& counters);

}  // namespace sesop
