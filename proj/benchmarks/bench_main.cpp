#include <cmath>

#include <benchmark/benchmark.h>

#include "muskat/dynamics.hpp"
#include "muskat/paracalc.hpp"

using namespace muskat;

namespace {

Interface wavy(const PeriodicGrid& g) {
  return Interface{SpectralField::from_function(g, [](double x) { return 0.1 * std::cos(x) + 0.02 * std::cos(3 * x); })};
}

void BM_DnApply(benchmark::State& state) {
  const PeriodicGrid g(static_cast<int>(state.range(0)));
  EllipticSolveConfig c;
  c.n_z = static_cast<int>(state.range(1));
  const DNOperator G(wavy(g), Side::lower, DomainSpec{}, c);
  const SpectralField f = SpectralField::from_function(g, [](double x) { return std::sin(2 * x); });
  for (auto _ : state) benchmark::DoNotOptimize(G.apply(f));
}
BENCHMARK(BM_DnApply)->Args({64, 32})->Args({128, 64})->Args({256, 64})->Unit(benchmark::kMillisecond);

void BM_ParadiffApply(benchmark::State& state) {
  const PeriodicGrid g(static_cast<int>(state.range(0)));
  const ParaSymbol a = ParaSymbol::from_function(
      g, 1.0, 5.0, [](double x, double xi) { return Complex((1.0 + 0.3 * std::cos(x)) * std::abs(xi)); });
  const ParaOperator T(a);
  const SpectralField u = SpectralField::from_function(g, [](double x) { return std::cos(7 * x); });
  for (auto _ : state) benchmark::DoNotOptimize(T.apply(u));
}
BENCHMARK(BM_ParadiffApply)->Arg(128)->Arg(256);

void BM_EvolutionRhs(benchmark::State& state) {
  const PeriodicGrid g(static_cast<int>(state.range(0)));
  FluidParams p;
  p.surface_tension = 0.01;
  EllipticSolveConfig c;
  c.n_z = 64;
  const Interface eta = wavy(g);
  for (auto _ : state) benchmark::DoNotOptimize(evolution_rhs(eta, p, DomainSpec{}, c));
}
BENCHMARK(BM_EvolutionRhs)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
