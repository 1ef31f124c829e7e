#include <benchmark/benchmark.h>

#include "cajal/diffcheck.hpp"
#include "cajal/fuzz.hpp"
#include "cajal/parser.hpp"

using namespace cajal;

namespace {

void BM_TrialsSerial(benchmark::State& state) {
  GenConfig cfg;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_trials(cfg, state.range(0)).failures);
}

void BM_TrialsParallel(benchmark::State& state) {
  GenConfig cfg;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_trials_parallel(cfg, state.range(0)).failures);
}

const CompiledProgram& nat_map() {
  static const CompiledProgram p =
      compile(typecheck({}, parse("\\n:Nat. iter n {y -> succ succ y} 3")));
  return p;
}

void BM_MatrixSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(matrix_of(nat_map(), state.range(0)).data.data());
}

void BM_MatrixParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(matrix_of_parallel(nat_map(), state.range(0)).data.data());
}

struct GradCase {
  CompiledProgram p;
  Env env;
};

const GradCase& unroll() {
  static const GradCase c = [] {
    DynSystem sys = two_neuron_system();
    Ctx ctx{{"m", Ty::fn(Ty::boolean(), Ty::boolean())}, {"b", Ty::boolean()}, {"n", Ty::nat()}};
    Env env{ctx, {map_from_matrix(SemTy::vbool(), SemTy::vbool(), sys.transition), sys.init,
                  Seq::one_hot(3)}};
    return GradCase{compile(typecheck(ctx, parse("iter b {y -> m y} n"))), env};
  }();
  return c;
}

void BM_GradSerial(benchmark::State& state) {
  const GradCase& c = unroll();
  for (auto _ : state)
    benchmark::DoNotOptimize(grad(c.p, c.env, "n", Vec2{1, 1}, state.range(0)).values.data());
}

void BM_GradParallel(benchmark::State& state) {
  const GradCase& c = unroll();
  for (auto _ : state)
    benchmark::DoNotOptimize(grad_parallel(c.p, c.env, "n", Vec2{1, 1}, state.range(0)).values.data());
}

}  // namespace

BENCHMARK(BM_TrialsSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->Arg(200)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MatrixSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatrixParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GradSerial)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradParallel)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
