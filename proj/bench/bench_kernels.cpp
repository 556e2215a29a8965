// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "hopf/bvp.hpp"
#include "hopf/contour.hpp"
#include "hopf/eigenpath.hpp"
#include "hopf/evans.hpp"
#include "hopf/propagation.hpp"

namespace {

using namespace hopf;

struct BistableRun {
  SpectralProblem problem = make_bistable();
  Contour contour;
  EigenPath path;
  PropagationConfig config;

  explicit BistableRun(std::size_t n) : contour(discretize_contour(0.0, 0.1, n)) {
    path = eigenpath_closed_form(problem, contour, problem.unstable_minus, End::minus);
  }
};

void BM_BatchPropagate(benchmark::State& state) {
  BistableRun run(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(batch_propagate(run.problem, run.path, run.config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchPropagateSerial(benchmark::State& state) {
  BistableRun run(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(batch_propagate_serial(run.problem, run.path.lambdas,
                                                    run.path.vectors, run.config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvansSamples(benchmark::State& state) {
  const auto problem = make_bistable();
  const auto contour = discretize_contour(0.0, 0.1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evans_samples(problem, contour, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvansSamplesSerial(benchmark::State& state) {
  const auto problem = make_bistable();
  const auto contour = discretize_contour(0.0, 0.1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evans_samples_serial(problem, contour, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BvpPhase(benchmark::State& state) {
  const auto problem = make_dirichlet();
  const auto contour = discretize_contour(-9.8696044010893586, 2.0,
                                          static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bvp_phase(problem, contour));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BvpPhaseSerial(benchmark::State& state) {
  const auto problem = make_dirichlet();
  const auto contour = discretize_contour(-9.8696044010893586, 2.0,
                                          static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bvp_phase_serial(problem, contour));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_BatchPropagate)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchPropagateSerial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvansSamples)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvansSamplesSerial)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BvpPhase)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BvpPhaseSerial)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
