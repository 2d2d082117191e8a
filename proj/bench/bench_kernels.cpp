// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "qdl/model.hpp"
#include "qdl/sweep.hpp"

using namespace qdl;

namespace {

SystemParams point(int n_max) {
  SystemParams p;
  p.layout = SpaceLayout(n_max, n_max);
  return p;
}

const PhononKernels& kernels() {
  static const PhononKernels k(default_bath(5.0));
  return k;
}

SandwichList all_terms(const LiouvillianBundle& b) {
  SandwichList out;
  for (const auto& t : b.terms) out.insert(out.end(), t.terms.begin(), t.terms.end());
  return out;
}

void BM_AssembleReference(benchmark::State& state) {
  const LiouvillianBundle b = build_full_liouvillian(point(static_cast<int>(state.range(0))), kernels());
  const SandwichList terms = all_terms(b);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_reference(b.generator.basis_ptr(), terms));
}

void BM_AssembleSerial(benchmark::State& state) {
  const LiouvillianBundle b = build_full_liouvillian(point(static_cast<int>(state.range(0))), kernels());
  const SandwichList terms = all_terms(b);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(b.generator.basis_ptr(), terms, Execution::serial));
}

void BM_AssembleParallel(benchmark::State& state) {
  const LiouvillianBundle b = build_full_liouvillian(point(static_cast<int>(state.range(0))), kernels());
  const SandwichList terms = all_terms(b);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(b.generator.basis_ptr(), terms, Execution::parallel));
}

void half_fourier_batch(benchmark::State& state, Execution exec) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> omegas(n);
  for (int i = 0; i < n; ++i) omegas[i] = -20.0 + 40.0 * i / (n - 1);
  std::vector<cplx> kg(n), ku(n);
  for (auto _ : state) {
    kernels().half_fourier(omegas, kg, ku, exec);
    benchmark::DoNotOptimize(kg.data());
  }
}

void BM_HalfFourierSerial(benchmark::State& state) { half_fourier_batch(state, Execution::serial); }
void BM_HalfFourierParallel(benchmark::State& state) { half_fourier_batch(state, Execution::parallel); }

void polaron(benchmark::State& state, Execution exec) {
  const SystemParams p = point(static_cast<int>(state.range(0)));
  const ComplexOperator h = hamiltonian_incoherent(p, kernels().displacement_average());
  const PhononCouplings x = phonon_couplings(p);
  const auto labels = symmetry_labels(p);
  for (auto _ : state) benchmark::DoNotOptimize(polaron_terms(h, x.x_g, x.x_u, kernels(), labels, exec));
}

void BM_PolaronSerial(benchmark::State& state) { polaron(state, Execution::serial); }
void BM_PolaronParallel(benchmark::State& state) { polaron(state, Execution::parallel); }

void BM_Sweep(benchmark::State& state) {
  RunConfig cfg = preset_config("fig2");
  cfg.sweep->points = 8;
  cfg.convergence.enabled = false;
  cfg.base.layout = SpaceLayout(4, 4);
  const SweepOptions opts{static_cast<int>(state.range(0)), true};
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg, opts));
}

}  // namespace

BENCHMARK(BM_AssembleReference)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleSerial)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HalfFourierSerial)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HalfFourierParallel)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PolaronSerial)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PolaronParallel)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
