#include "sesop/problems.hpp"

#include "sesop/rng.hpp"
#include "sesop/text.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace sesop {

// ---------------------------------------------------------------------------
// ExpSquares

ExpSquares::ExpSquares(Index n) : n_(n), weights_(n) {
  if (n < 1) throw Error("expsquares: n must be >= 1");
  for (Index j = 0; j < n; ++j) weights_[j] = static_cast<double>((j + 1) * (j + 1));
}

double ExpSquares::exp_term(const Vector& x) const {
  const double s = x.sum();
  if (s < -700.0) throw Error("exponent overflow");
  return std::exp(-s);
}

double ExpSquares::value(const Vector& x, Counters& counters) const {
  ++counters.fevals;
  return exp_term(x) + 0.5 * weights_.dot(x.cwiseAbs2());
}

Vector ExpSquares::gradient(const Vector& x, Counters& counters) const {
  ++counters.gevals;
  Vector g = weights_.cwiseProduct(x);
  g.array() -= exp_term(x);
  return g;
}

double ExpSquares::value_and_gradient(const Vector& x, Vector& grad, Counters& counters) const {
  ++counters.fevals;
  ++counters.gevals;
  const double e = exp_term(x);
  grad = weights_.cwiseProduct(x);
  grad.array() -= e;
  return e + 0.5 * weights_.dot(x.cwiseAbs2());
}

Vector ExpSquares::hvp(const Vector& x, const Vector& v, Counters& counters) const {
  ++counters.hvps;
  Vector hv = weights_.cwiseProduct(v);
  hv.array() += exp_term(x) * v.sum();
  return hv;
}

std::optional<Vector> ExpSquares::hessian_solve(const Vector& x, const Vector& rhs,
                                                Counters&) const {
  const double e = exp_term(x);
  const Vector dinv_rhs = rhs.cwiseQuotient(weights_);
  const Vector dinv_one = weights_.cwiseInverse();
  const double denom = 1.0 + e * dinv_one.sum();
  return Vector(dinv_rhs - (e * dinv_rhs.sum() / denom) * dinv_one);
}

double ExpSquares::lipschitz_bound(double level) const {
  const double n = static_cast<double>(n_);
  return n * n + n * level;
}

// ---------------------------------------------------------------------------
// SvmObjective

SvmObjective::SvmObjective(std::shared_ptr<const LinearOperator> data, Vector labels, double c)
    : data_(std::move(data)), labels_(std::move(labels)), c_(c) {
  if (!data_) throw Error("svm: null data operator");
  if (labels_.size() != data_->rows()) throw Error("svm: label count mismatch");
  if (!(c_ > 0.0)) throw Error("svm: C must be positive");
}

Vector SvmObjective::slacks(const Vector& w, Counters& counters) const {
  Vector s = data_->apply(w, counters);
  // 1 - y_i x_i^T w, clipped at zero.
  for (Index i = 0; i < s.size(); ++i) s[i] = std::max(0.0, 1.0 - labels_[i] * s[i]);
  return s;
}

double SvmObjective::hinge_sum(const Vector& w, Counters& counters) const {
  return slacks(w, counters).squaredNorm();
}

double SvmObjective::value(const Vector& w, Counters& counters) const {
  ++counters.fevals;
  return 0.5 * w.squaredNorm() + c_ * slacks(w, counters).squaredNorm();
}

Vector SvmObjective::gradient(const Vector& w, Counters& counters) const {
  ++counters.gevals;
  const Vector s = slacks(w, counters);
  return w - 2.0 * c_ * data_->adjoint(labels_.cwiseProduct(s), counters);
}

double SvmObjective::value_and_gradient(const Vector& w, Vector& grad, Counters& counters) const {
  ++counters.fevals;
  ++counters.gevals;
  const Vector s = slacks(w, counters);
  grad = w - 2.0 * c_ * data_->adjoint(labels_.cwiseProduct(s), counters);
  return 0.5 * w.squaredNorm() + c_ * s.squaredNorm();
}

Vector SvmObjective::hvp(const Vector& w, const Vector& v, Counters& counters) const {
  ++counters.hvps;
  // Generalized Hessian: I + 2C X^T D X with D the active-set indicator.
  const Vector margins = data_->apply(w, counters);
  Vector xv = data_->apply(v, counters);
  for (Index i = 0; i < xv.size(); ++i)
    if (1.0 - labels_[i] * margins[i] <= 0.0) xv[i] = 0.0;
  return v + 2.0 * c_ * data_->adjoint(xv, counters);
}

// ---------------------------------------------------------------------------
// Generators

LeastSquaresInstance make_quadratic_ls(Index n, std::uint64_t seed, double noise) {
  if (n < 2) throw Error("quadratic_ls: n must be >= 2");
  Rng rng(seed);
  Matrix a = rng.normal_matrix(n, n, 1.0 / std::sqrt(static_cast<double>(n)));
  Vector x_bar = rng.normal_vector(n);
  Vector b = a * x_bar;
  if (noise != 0.0) b += rng.normal_vector(n, noise);
  auto op = std::make_shared<DenseOperator>(std::move(a));
  auto obj = std::make_shared<CompositeObjective>(op, std::move(b), 0.0);
  return {std::move(obj), std::move(x_bar)};
}

LeastSquaresInstance make_l1_ls(Index m, Index n, std::uint64_t seed, double mu, double kappa,
                                double noise) {
  if (m > n) throw Error("underdetermined generator expects m <= n");
  if (m < 1) throw Error("l1_ls: m must be >= 1");
  if (!(kappa >= 0.0)) throw Error("l1_ls: kappa must be nonnegative");
  if (!(mu >= 0.0)) throw Error("l1_ls: mu must be nonnegative");
  Rng rng(seed);
  const Matrix g = rng.normal_matrix(m, n);
  Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector sigma(m);
  for (Index i = 0; i < m; ++i) {
    const double t = m == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(m - 1);
    sigma[i] = std::pow(10.0, -kappa * t);
  }
  Matrix a = svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();

  const auto k = static_cast<Index>(std::ceil(0.05 * static_cast<double>(n)));
  Vector x_sparse = Vector::Zero(n);
  for (Index idx : rng.sample_without_replacement(n, k)) x_sparse[idx] = rng.normal();

  Vector b = a * x_sparse;
  if (noise != 0.0) b += rng.normal_vector(m, noise);
  auto op = std::make_shared<DenseOperator>(std::move(a));
  auto obj = std::make_shared<CompositeObjective>(op, std::move(b), mu);
  return {std::move(obj), std::move(x_sparse)};
}

std::shared_ptr<const ExpSquares> make_expsquares(Index n) {
  return std::make_shared<ExpSquares>(n);
}

SvmInstance make_svm_smooth(Index num_examples, Index num_features, std::uint64_t seed,
                            const SvmParams& params) {
  if (num_examples < 1 || num_features < 1) throw Error("svm: sizes must be >= 1");
  if (!(params.margin > 0.0)) throw Error("svm: margin must be positive");
  Rng rng(seed);
  Vector w_dir = rng.normal_vector(num_features);
  w_dir.normalize();
  Matrix x = rng.normal_matrix(num_examples, num_features,
                               1.0 / std::sqrt(static_cast<double>(num_features)));
  Vector y(num_examples);
  for (Index i = 0; i < num_examples; ++i) {
    y[i] = x.row(i).dot(w_dir) >= 0.0 ? 1.0 : -1.0;
    // Push each example away from the separating hyperplane.
    x.row(i) += (y[i] * params.margin) * w_dir.transpose();
  }
  const auto flips = static_cast<Index>(
      std::llround(params.flip_fraction * static_cast<double>(num_examples)));
  for (Index idx : rng.sample_without_replacement(num_examples, flips)) y[idx] = -y[idx];

  auto op = std::make_shared<DenseOperator>(std::move(x));
  auto obj = std::make_shared<SvmObjective>(op, std::move(y), params.c);
  return {std::move(obj), Vector((2.0 / params.margin) * w_dir)};
}

GroundTruth expsquares_ground_truth(Index n) {
  if (n < 1) throw Error("expsquares: n must be >= 1");
  double inv_sq_sum = 0.0;
  for (Index j = n; j >= 1; --j) inv_sq_sum += 1.0 / static_cast<double>(j * j);
  // h(s) = s - exp(-s) * S is increasing, h(0) < 0, h(S) > 0.
  double lo = 0.0, hi = inv_sq_sum;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (mid - std::exp(-mid) * inv_sq_sum < 0.0) lo = mid;
    else hi = mid;
    if (mid == lo && mid == hi) break;
  }
  const double s = 0.5 * (lo + hi);
  const double e = std::exp(-s);
  Vector x(n);
  for (Index j = 0; j < n; ++j) x[j] = e / static_cast<double>((j + 1) * (j + 1));
  Counters scratch;
  ExpSquares f(n);
  GroundTruth truth;
  truth.f_opt = f.value(x, scratch);
  truth.x_opt = std::move(x);
  truth.method = GroundTruth::Method::analytic;
  return truth;
}

// ---------------------------------------------------------------------------
// ProblemSpec

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::quadratic_ls: return "quadratic_ls";
    case ProblemKind::l1_ls: return "l1_ls";
    case ProblemKind::expsquares: return "expsquares";
    case ProblemKind::svm_smooth: return "svm_smooth";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(std::string_view name) {
  for (ProblemKind k : {ProblemKind::quadratic_ls, ProblemKind::l1_ls, ProblemKind::expsquares,
                        ProblemKind::svm_smooth})
    if (to_string(k) == name) return k;
  throw Error("unknown problem kind '" + std::string(name) +
              "' (valid: quadratic_ls, l1_ls, expsquares, svm_smooth)");
}

ProblemSpec ProblemSpec::defaults(ProblemKind kind) {
  ProblemSpec s;
  s.kind = kind;
  switch (kind) {
    case ProblemKind::quadratic_ls:
      s.m = s.n = 400;
      break;
    case ProblemKind::l1_ls:
      s.m = 200;
      s.n = 512;
      s.mu = 1e-6;
      s.kappa = 6.0;
      s.noise = 1e-3;
      break;
    case ProblemKind::expsquares:
      s.m = s.n = 200;
      break;
    case ProblemKind::svm_smooth:
      s.m = 1495;
      s.n = 2000;
      break;
  }
  return s;
}

std::string ProblemSpec::to_string() const {
  std::ostringstream out;
  out << "kind=" << sesop::to_string(kind);
  switch (kind) {
    case ProblemKind::quadratic_ls:
      out << ",n=" << n << ",seed=" << seed << ",noise=" << format_double(noise);
      break;
    case ProblemKind::l1_ls:
      out << ",m=" << m << ",n=" << n << ",seed=" << seed << ",mu=" << format_double(mu)
          << ",kappa=" << format_double(kappa) << ",noise=" << format_double(noise);
      break;
    case ProblemKind::expsquares:
      out << ",n=" << n << ",seed=" << seed;
      break;
    case ProblemKind::svm_smooth:
      out << ",m=" << m << ",n=" << n << ",seed=" << seed << ",c=" << format_double(svm.c)
          << ",margin=" << format_double(svm.margin)
          << ",flip=" << format_double(svm.flip_fraction);
      break;
  }
  return out.str();
}

ProblemSpec ProblemSpec::parse(std::string_view text) {
  auto kv = parse_key_values(text);
  const auto kind_it = kv.find("kind");
  if (kind_it == kv.end()) throw Error("problem spec needs kind=...");
  ProblemSpec s = defaults(parse_problem_kind(kind_it->second));
  kv.erase(kind_it);
  for (const auto& [key, value] : kv) {
    if (key == "m") s.m = parse_int(value);
    else if (key == "n") s.n = parse_int(value);
    else if (key == "seed") s.seed = static_cast<std::uint64_t>(parse_int(value));
    else if (key == "mu") s.mu = parse_double(value);
    else if (key == "kappa") s.kappa = parse_double(value);
    else if (key == "noise") s.noise = parse_double(value);
    else if (key == "c") s.svm.c = parse_double(value);
    else if (key == "margin") s.svm.margin = parse_double(value);
    else if (key == "flip") s.svm.flip_fraction = parse_double(value);
    else throw Error("unknown problem key '" + key + "'");
  }
  if (s.kind == ProblemKind::quadratic_ls || s.kind == ProblemKind::expsquares) s.m = s.n;
  return s;
}

Problem make_problem(const ProblemSpec& spec) {
  Problem p;
  p.spec = spec;
  switch (spec.kind) {
    case ProblemKind::quadratic_ls: {
      auto inst = make_quadratic_ls(spec.n, spec.seed, spec.noise);
      // Square Gaussian A is invertible with probability one, so the
      // residual can always be driven to zero.
      p.truth.f_opt = 0.0;
      if (spec.noise == 0.0) {
        p.truth.x_opt = inst.x_planted;
      } else {
        p.truth.x_opt = inst.objective->op().dense()->partialPivLu().solve(inst.objective->b());
      }
      p.truth.method = GroundTruth::Method::analytic;
      p.x_true = std::move(inst.x_planted);
      p.objective = std::move(inst.objective);
      break;
    }
    case ProblemKind::l1_ls: {
      auto inst = make_l1_ls(spec.m, spec.n, spec.seed, spec.mu, spec.kappa, spec.noise);
      p.truth.method = GroundTruth::Method::oracle_solver;
      p.x_true = std::move(inst.x_planted);
      p.objective = std::move(inst.objective);
      break;
    }
    case ProblemKind::expsquares:
      p.objective = make_expsquares(spec.n);
      p.truth = expsquares_ground_truth(spec.n);
      break;
    case ProblemKind::svm_smooth: {
      auto inst = make_svm_smooth(spec.m, spec.n, spec.seed, spec.svm);
      p.truth.method = GroundTruth::Method::oracle_solver;
      p.objective = std::move(inst.objective);
      break;
    }
  }
  p.x0 = Vector::Zero(p.objective->dim());
  if (spec.kind == ProblemKind::expsquares && spec.seed != 0) {
    Rng rng(spec.seed);
    for (Index j = 0; j < p.x0.size(); ++j) p.x0[j] = rng.normal() / static_cast<double>(j + 1);
  }
  return p;
}

}  // namespace sesop
