#include "sesop/directions.hpp"
#include "sesop/problems.hpp"
#include "sesop/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sesop;

namespace {

struct L1Fixture {
  LeastSquaresInstance inst = make_l1_ls(30, 60, 4, 0.2, 2.0);
  const CompositeObjective& obj = *inst.objective;
  const Matrix& a = *obj.op().dense();
  const Vector& b = obj.b();

  double f(const Vector& x) const { return (a * x - b).squaredNorm() + obj.mu() * x.lpNorm<1>(); }
};

// Minimizer of a convex function of one variable by golden section on [lo, hi].
template <class F>
double golden_min(F phi, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  for (int i = 0; i < 200; ++i) {
    if (phi(c) < phi(d)) hi = d;
    else lo = c;
    c = hi - g * (hi - lo);
    d = lo + g * (hi - lo);
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Directions, GradientIsNegated) {
  Vector g(3);
  g << 1.0, -2.0, 0.5;
  EXPECT_EQ(dir_gradient(g), -g);
}

TEST(Directions, PcdIsExactCoordinateMinimization) {
  L1Fixture p;
  Rng rng(1);
  Vector x = rng.normal_vector(60, 0.5);
  x[3] = 0.0;
  Counters c;
  const Vector r = p.obj.residual(x, c);
  const Vector d = dir_pcd(p.obj, x, r, c);
  EXPECT_EQ(c.matvecs, 2);  // residual + one adjoint
  for (Index j = 0; j < 60; ++j) {
    auto phi = [&](double t) {
      Vector z = x;
      z[j] += t;
      return p.f(z);
    };
    EXPECT_NEAR(d[j], golden_min(phi, -10.0, 10.0), 1e-6) << "coordinate " << j;
  }
}

TEST(Directions, SsfMinimizesSurrogate) {
  L1Fixture p;
  Rng rng(2);
  const Vector x = rng.normal_vector(60, 0.5);
  Counters c;
  const Vector r = p.obj.residual(x, c);
  const double cc = p.obj.ssf_constant();
  const Vector d = dir_ssf(p.obj, x, r, cc, c);
  auto surrogate = [&](const Vector& z) {
    return r.squaredNorm() + 2.0 * r.dot(p.a * (z - x)) + cc * (z - x).squaredNorm() +
           p.obj.mu() * z.lpNorm<1>();
  };
  const double best = surrogate(x + d);
  for (int i = 0; i < 200; ++i) {
    const Vector z = x + d + rng.normal_vector(60, std::pow(10.0, -4.0 + 3.0 * rng.uniform()));
    EXPECT_GE(surrogate(z), best - 1e-12 * std::abs(best));
  }
  // Majorization guarantees descent.
  EXPECT_LE(p.f(x + d), p.f(x));
}

TEST(Directions, SsfRejectsBadConstant) {
  L1Fixture p;
  Counters c;
  const Vector x = Vector::Zero(60);
  EXPECT_THROW(dir_ssf(p.obj, x, p.obj.residual(x, c), 0.0, c), Error);
}

TEST(Directions, ZeroAtMinimizerOfSeparableProblem) {
  // A = I: the optimum of ||x - b||^2 + mu ||x||_1 is soft(b, mu / 2), and
  // PCD and SSF (c = 1) both vanish there.
  const Index n = 8;
  Rng rng(3);
  const Vector b = rng.normal_vector(n);
  const double mu = 0.7;
  CompositeObjective obj(std::make_shared<DenseOperator>(Matrix::Identity(n, n)), b, mu);
  Vector x(n);
  for (Index j = 0; j < n; ++j) x[j] = soft_threshold(b[j], mu / 2.0);
  Counters c;
  const Vector r = obj.residual(x, c);
  EXPECT_LT(dir_pcd(obj, x, r, c).norm(), 1e-15);
  EXPECT_LT(dir_ssf(obj, x, r, 1.0, c).norm(), 1e-15);
}

TEST(Directions, NewtonSolvesHessianSystem) {
  const auto obj = make_expsquares(25);
  Rng rng(4);
  const Vector x = rng.normal_vector(25, 0.1);
  Counters c;
  const Vector g = obj->gradient(x, c);
  const Vector d = dir_newton(*obj, x, g, c);
  EXPECT_LT((obj->hvp(x, d, c) + g).norm(), 1e-12 * g.norm());
}

TEST(Directions, NewtonUnavailableWithoutSolve) {
  const auto inst = make_svm_smooth(40, 10, 1);
  Counters c;
  const Vector x = Vector::Zero(10);
  EXPECT_THROW(dir_newton(*inst.objective, x, inst.objective->gradient(x, c), c), NewtonUnavailable);
}

TEST(Directions, OrthWeights) {
  OrthState orth(Vector::Zero(2));
  Vector g(2);
  g << 1.0, 0.0;
  double w = 0.0;
  double sum = 0.0;
  for (int k = 0; k < 6; ++k) {
    const auto dirs = orth.update(g, Vector::Constant(2, k + 1.0));
    w = k == 0 ? 1.0 : 0.5 + std::sqrt(0.25 + w * w);
    sum += w;
    EXPECT_DOUBLE_EQ(orth.last_weight(), w);
    EXPECT_DOUBLE_EQ(orth.weighted_sum()[0], sum);
    EXPECT_EQ(dirs.total_step, Vector::Constant(2, k + 1.0));
    EXPECT_DOUBLE_EQ(dirs.weighted_grad[0], -1.0);
  }
  // w_k grows like k / 2.
  for (int k = 6; k < 2000; ++k) w = OrthState::next_weight(w);
  EXPECT_NEAR(w / 2000.0, 0.5, 0.01);
}

TEST(Directions, OrthImagesFollowLinearity) {
  Rng rng(5);
  const Matrix a = rng.normal_matrix(4, 3);
  OrthState orth(Vector::Zero(3));
  OrthState::Directions last;
  for (int k = 0; k < 4; ++k) {
    const Vector g = rng.normal_vector(3);
    last = orth.update(g, Vector::Zero(3), Vector(a * g));
  }
  ASSERT_TRUE(last.weighted_grad_image);
  EXPECT_LT((*last.weighted_grad_image - a * last.weighted_grad).norm(), 1e-12);
  // A missing image invalidates the cached one for good.
  last = orth.update(Vector::Ones(3), Vector::Zero(3));
  EXPECT_FALSE(last.weighted_grad_image);
  last = orth.update(Vector::Ones(3), Vector::Zero(3), Vector(a * Vector::Ones(3)));
  EXPECT_FALSE(last.weighted_grad_image);
}

TEST(Directions, CompositeDirectionalDerivative) {
  L1Fixture p;
  Rng rng(6);
  Vector x = rng.normal_vector(60, 0.5);
  x.head(10).setZero();
  const Vector d = rng.normal_vector(60);
  Counters c;
  const Vector atr = p.obj.op().adjoint(p.obj.residual(x, c), c);
  const double t = 1e-7;
  const double fd = (p.f(x + t * d) - p.f(x)) / t;
  EXPECT_NEAR(composite_directional_derivative(p.obj, x, atr, d), fd, 1e-4 * (1.0 + std::abs(fd)));
}
