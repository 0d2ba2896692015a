#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sesop {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by dir_newton when the Hessian at the current point is not
/// positive definite (or no solve is available).
class NewtonUnavailable : public Error {
public:
  NewtonUnavailable() : Error("newton direction unavailable") {}
};

class LineSearchFailed : public Error {
public:
  LineSearchFailed() : Error("line search failed") {}
};

class EmptySubspace : public Error {
public:
  EmptySubspace() : Error("empty subspace") {}
};

/// Cumulative cost counters of one solver run.
///
/// Operators and objectives are immutable; every evaluation takes the
/// counters of the run that asked for it.
struct Counters {
  std::int64_t matvecs = 0;  ///< applications of A or A^T
  std::int64_t fevals = 0;
  std::int64_t gevals = 0;
  std::int64_t hvps = 0;

  void reset() { *this = Counters{}; }
};

}  // namespace sesop
