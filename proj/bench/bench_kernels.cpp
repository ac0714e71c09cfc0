// Serial reference kernels against their OpenMP counterparts, plus a full IMEX step.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hetflow/kernels.hpp"
#include "hetflow/model.hpp"
#include "hetflow/semiflow.hpp"
#include "hetflow/tridiag.hpp"

using namespace hetflow;

namespace {

struct Setup {
  explicit Setup(std::size_t n)
      : grid(make_grid(50.0, n)),
        model(build_switch_model({1.0, Well::zero()}, {1.0, Well::gaussian(3.0, 1.0)}, 1.0)),
        nodal(model.sample(grid)),
        op(assemble_laplacian(grid)),
        u(n),
        out(n) {
    std::mt19937_64 rng(n);
    std::uniform_real_distribution<double> d(-2, 2);
    for (auto& x : u) x = d(rng);
  }
  Grid grid;
  NonlinearityModel model;
  NodalModel nodal;
  TridiagOperator op;
  std::vector<double> u, out;
};

template <bool Parallel>
void BM_Nemitski(benchmark::State& st) {
  Setup s(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    if constexpr (Parallel) kernels::nemitski(s.nodal, s.u, s.out);
    else serial::nemitski(s.nodal, s.u, s.out);
    benchmark::DoNotOptimize(s.out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_Energy(benchmark::State& st) {
  Setup s(static_cast<std::size_t>(st.range(0)));
  const auto w = s.grid.cell_weights();
  for (auto _ : st) {
    double e = Parallel ? kernels::potential_energy(s.nodal, w, s.u) : serial::potential_energy(s.nodal, w, s.u);
    benchmark::DoNotOptimize(e);
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_TridiagApply(benchmark::State& st) {
  Setup s(static_cast<std::size_t>(st.range(0)));
  const auto& t = s.op.matrix();
  for (auto _ : st) {
    if constexpr (Parallel) kernels::tridiag_apply(t.diag, t.off, s.u, s.out);
    else serial::tridiag_apply(t.diag, t.off, s.u, s.out);
    benchmark::DoNotOptimize(s.out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_ImexStep(benchmark::State& st) {
  Setup s(static_cast<std::size_t>(st.range(0)));
  const ImexStepper stepper(s.model, s.op, stable_step(s.model, s.grid, 0.05));
  for (auto _ : st) {
    stepper.step(s.u);
    benchmark::DoNotOptimize(s.u.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_Nemitski<false>)->Arg(1000)->Arg(100000)->Arg(1000000);
BENCHMARK(BM_Nemitski<true>)->Arg(1000)->Arg(100000)->Arg(1000000);
BENCHMARK(BM_Energy<false>)->Arg(1000)->Arg(100000)->Arg(1000000);
BENCHMARK(BM_Energy<true>)->Arg(1000)->Arg(100000)->Arg(1000000);
BENCHMARK(BM_TridiagApply<false>)->Arg(100000)->Arg(1000000);
BENCHMARK(BM_TridiagApply<true>)->Arg(100000)->Arg(1000000);
BENCHMARK(BM_ImexStep)->Arg(1000)->Arg(100000);

BENCHMARK_MAIN();
