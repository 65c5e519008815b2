#include <benchmark/benchmark.h>

#include "twhe/chern.hpp"
#include "twhe/expressions.hpp"
#include "twhe/presets.hpp"
#include "twhe/solver.hpp"
#include "twhe/stability.hpp"

namespace twhe {
namespace {

struct Split {
  GridPtr grid;
  CoverPtr cover;
  TorusGeometry geom;
  TwistedBundle E;
  MetricField K;
  explicit Split(int N, int d2 = -1)
      : grid(make_grid(1, N)),
        cover(std::make_shared<const ChartCover>(grid, std::vector<int>{1})),
        geom(TorusGeometry::flat(grid)),
        E(direct_sum({build_theta_bundle(build_trivial_twist(cover), 1),
                      build_theta_bundle(build_trivial_twist(cover), d2)})),
        K(normalize_background(build_metric("diag:0.3*cosx,-0.2*cosy", E), E, geom)) {}
};

void BM_Curvature(benchmark::State& state) {
  const Split s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(curvature(s.K, s.E));
}
BENCHMARK(BM_Curvature)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Degree(benchmark::State& state) {
  const Split s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(degree(s.K, s.E, s.geom));
}
BENCHMARK(BM_Degree)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Residual(benchmark::State& state) {
  const Split s(static_cast<int>(state.range(0)));
  const PerturbedProblem P(s.K, s.E, s.geom);
  EndoField x(s.grid, 2);
  for (auto _ : state) benchmark::DoNotOptimize(P.residual(x, 0.1));
}
BENCHMARK(BM_Residual)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_HelmholtzSolve(benchmark::State& state) {
  const GridPtr g = make_grid(1, static_cast<int>(state.range(0)));
  const CoverPtr cover = std::make_shared<const ChartCover>(g, std::vector<int>{});
  const TwistedBundle L = build_trivial_bundle(build_trivial_twist(cover), 1);
  const TorusGeometry geom = TorusGeometry::flat(g);
  const RealField psi = ScalarExpr::parse("cosx + 0.5*siny").sample(g);
  const PerturbedProblem P(reference_metric(L).conformally_scaled(psi), L, geom);
  SolverOptions o;
  o.epsilon = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(solve_perturbed(P, o));
}
BENCHMARK(BM_HelmholtzSolve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_UnstableSweepAndProbe(benchmark::State& state) {
  const Split s(64);
  const PerturbedProblem P(s.K, s.E, s.geom);
  SolverOptions o;
  o.residual_tol = 1e-9;
  for (auto _ : state) {
    const auto traces = epsilon_sweep(P, {0.3, 0.1, 0.03, 0.01}, o);
    benchmark::DoNotOptimize(uy_probe(traces.back().s, s.K, s.E, s.geom));
  }
}
BENCHMARK(BM_UnstableSweepAndProbe)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
}  // namespace twhe
BENCHMARK_MAIN();
