#include "sesop/directions.hpp"
#include "sesop/problems.hpp"
#include "sesop/rng.hpp"
#include "sesop/subspace.hpp"
#include "sesop/tn.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace sesop;

LeastSquaresInstance l1_instance(Index n) {
  return make_l1_ls(n * 200 / 512, n, 1, 1e-6, 6.0);
}

void BM_Matvec(benchmark::State& state) {
  const auto inst = l1_instance(state.range(0));
  const auto& op = inst.objective->op();
  Rng rng(2);
  const Vector x = rng.normal_vector(op.cols());
  Counters counters;
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(x, counters));
}
BENCHMARK(BM_Matvec)->Arg(256)->Arg(512)->Arg(1024);

void BM_Adjoint(benchmark::State& state) {
  const auto inst = l1_instance(state.range(0));
  const auto& op = inst.objective->op();
  Rng rng(3);
  const Vector y = rng.normal_vector(op.rows());
  Counters counters;
  for (auto _ : state) benchmark::DoNotOptimize(op.adjoint(y, counters));
}
BENCHMARK(BM_Adjoint)->Arg(256)->Arg(512)->Arg(1024);

void BM_DirPcd(benchmark::State& state) {
  const auto inst = l1_instance(state.range(0));
  const auto& obj = *inst.objective;
  Rng rng(4);
  const Vector x = rng.normal_vector(obj.dim());
  Counters counters;
  const Vector r = obj.residual(x, counters);
  for (auto _ : state) benchmark::DoNotOptimize(dir_pcd(obj, x, r, counters));
}
BENCHMARK(BM_DirPcd)->Arg(512);

void BM_DirSsf(benchmark::State& state) {
  const auto inst = l1_instance(state.range(0));
  const auto& obj = *inst.objective;
  Rng rng(5);
  const Vector x = rng.normal_vector(obj.dim());
  Counters counters;
  const Vector r = obj.residual(x, counters);
  for (auto _ : state) benchmark::DoNotOptimize(dir_ssf(obj, x, r, obj.ssf_constant(), counters));
}
BENCHMARK(BM_DirSsf)->Arg(512);

// One composite subspace minimization over a frame of size k.
void BM_SubspaceMinimize(benchmark::State& state) {
  const auto inst = l1_instance(512);
  const auto& obj = *inst.objective;
  const Index k = state.range(0);
  Rng rng(6);
  const Vector x = Vector::Zero(obj.dim());
  Counters counters;
  std::vector<FrameColumn> cols;
  for (Index j = 0; j < k; ++j)
    cols.push_back(FrameColumn{rng.normal_vector(obj.dim()), std::nullopt, Provenance::previous_step});
  FrameOptions fo;
  fo.history_steps = 0;
  const SubspaceFrame frame = build_frame(x, cols, HistoryBuffer(0), fo,
                                          [&](const Vector& d) { return obj.op().apply(d, counters); });
  BasePoint base;
  base.residual = obj.residual(x, counters);
  base.f = obj.value_from_residual(*base.residual, x);
  for (auto _ : state)
    benchmark::DoNotOptimize(subspace_minimize(obj, frame, base, InnerOptions{}, counters));
}
BENCHMARK(BM_SubspaceMinimize)->Arg(2)->Arg(9);

void BM_InnerCg(benchmark::State& state) {
  const auto obj = make_expsquares(200);
  const Vector x = Vector::Zero(200);
  Counters counters;
  Vector g;
  const double f = obj->value_and_gradient(x, g, counters);
  const QuadraticModel model{*obj, x, f, g};
  for (auto _ : state)
    benchmark::DoNotOptimize(inner_cg(model, x, state.range(0), 0.0, std::nullopt, counters));
}
BENCHMARK(BM_InnerCg)->Arg(10)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
