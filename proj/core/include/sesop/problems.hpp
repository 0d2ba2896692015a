#pragma once

#include "sesop/objective.hpp"
#include "sesop/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace sesop {

/// f(x) = exp(-1^T x) + 1/2 sum_j j^2 x_j^2.
class ExpSquares final : public Objective {
public:
  explicit ExpSquares(Index n);

  Index dim() const override { return n_; }
  Capabilities capabilities() const override {
    return {Capability::gradient, Capability::hvp, Capability::hessian_solve};
  }
  std::string name() const override { return "expsquares"; }

  double value(const Vector& x, Counters& counters) const override;
  Vector gradient(const Vector& x, Counters& counters) const override;
  double value_and_gradient(const Vector& x, Vector& grad, Counters& counters) const override;
  Vector hvp(const Vector& x, const Vector& v, Counters& counters) const override;
  /// Sherman-Morrison solve with diag(j^2) + exp(-sum x) 1 1^T.
  std::optional<Vector> hessian_solve(const Vector& x, const Vector& rhs,
                                      Counters& counters) const override;

  /// Upper bound on the gradient Lipschitz constant over {f <= level}:
  /// n^2 + n * level, since exp(-sum x) <= f(x).
  double lipschitz_bound(double level) const;

private:
  double exp_term(const Vector& x) const;

  Index n_;
  Vector weights_;  // j^2
};

/// Squared-hinge linear SVM, f(w) = 1/2 ||w||^2 + C sum_i max(0, 1 - y_i x_i^T w)^2.
class SvmObjective final : public Objective {
public:
  SvmObjective(std::shared_ptr<const LinearOperator> data, Vector labels, double c);

  Index dim() const override { return data_->cols(); }
  Capabilities capabilities() const override { return {Capability::gradient, Capability::hvp}; }
  std::string name() const override { return "svm_smooth"; }

  double value(const Vector& w, Counters& counters) const override;
  Vector gradient(const Vector& w, Counters& counters) const override;
  double value_and_gradient(const Vector& w, Vector& grad, Counters& counters) const override;
  Vector hvp(const Vector& w, const Vector& v, Counters& counters) const override;

  /// sum_i max(0, 1 - y_i x_i^T w)^2.
  double hinge_sum(const Vector& w, Counters& counters) const;

  const LinearOperator& data() const { return *data_; }
  const Vector& labels() const { return labels_; }
  double c() const { return c_; }

private:
  Vector slacks(const Vector& w, Counters& counters) const;

  std::shared_ptr<const LinearOperator> data_;
  Vector labels_;
  double c_;
};

enum class ProblemKind { quadratic_ls, l1_ls, expsquares, svm_smooth };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view name);

struct SvmParams {
  double c = 1.0;
  double margin = 0.1;         ///< geometric margin imposed before label flips
  double flip_fraction = 0.05; ///< fraction of labels flipped afterwards

  bool operator==(const SvmParams&) const = default;
};

/// Everything needed to regenerate a problem instance. For svm_smooth,
/// m is the number of examples and n the number of features.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::quadratic_ls;
  Index m = 0;
  Index n = 0;
  std::uint64_t seed = 0;
  double mu = 0.0;
  double kappa = 6.0;
  double noise = 0.0;
  SvmParams svm;

  /// Flat "key=value,..." form. Only keys relevant to the kind are written.
  std::string to_string() const;
  /// Parses the flat form; missing keys take the kind's defaults.
  static ProblemSpec parse(std::string_view text);
  /// Defaults for a kind (desk-scale experiment sizes).
  static ProblemSpec defaults(ProblemKind kind);

  bool operator==(const ProblemSpec&) const = default;
};

struct GroundTruth {
  enum class Method { analytic, oracle_solver };
  std::optional<double> f_opt;
  std::optional<Vector> x_opt;
  Method method = Method::analytic;
};

/// A generated instance ready for solvers.
struct Problem {
  ProblemSpec spec;
  std::shared_ptr<const Objective> objective;
  GroundTruth truth;
  std::optional<Vector> x_true;  ///< planted signal, when one exists
  Vector x0;
};

struct LeastSquaresInstance {
  std::shared_ptr<const CompositeObjective> objective;
  Vector x_planted;
};

struct SvmInstance {
  std::shared_ptr<const SvmObjective> objective;
  /// Weight vector with y_i x_i^T w >= 2 on every unflipped example.
  Vector w_feasible;
};

/// ||A x - b||^2 with A n x n, entries N(0, 1/n); b = A x_bar + noise * N(0, 1).
LeastSquaresInstance make_quadratic_ls(Index n, std::uint64_t seed, double noise = 0.0);

/// ||A x - b||^2 + mu ||x||_1 with A m x n built from a Gaussian matrix whose
/// singular values are replaced by a log-spaced decay from 1 to 10^-kappa;
/// b = A x_sparse + noise * N(0, 1), x_sparse with ceil(0.05 n) N(0,1) nonzeros.
LeastSquaresInstance make_l1_ls(Index m, Index n, std::uint64_t seed, double mu, double kappa,
                                double noise = 1e-3);

std::shared_ptr<const ExpSquares> make_expsquares(Index n);

SvmInstance make_svm_smooth(Index num_examples, Index num_features, std::uint64_t seed,
                            const SvmParams& params = {});

/// Optimum of ExpSquares(n) from the scalar fixed point s = exp(-s) sum 1/j^2
/// (bisection to 1e-14); x*_j = exp(-s) / j^2.
GroundTruth expsquares_ground_truth(Index n);

/// Builds the instance named by spec. Ground truth is filled in where it is
/// known analytically (quadratic_ls, expsquares); l1_ls and svm_smooth need
/// an oracle solver run.
///
/// x0 is zero, except for expsquares with a nonzero seed, which has no random
/// data and instead starts from x0_j = z_j / j with z ~ N(0, I).
Problem make_problem(const ProblemSpec& spec);

}  // namespace sesop
