// Serial vs OpenMP innovation sweep on a city-sized panel.

#include <benchmark/benchmark.h>

#include "poinar/innovations.hpp"
#include "poinar/simulate.hpp"
#include "poinar/study.hpp"

using namespace poinar;

namespace {

struct Fixture {
  CountPanel panel;
  std::vector<double> alpha, rates, theta;

  explicit Fixture(std::size_t L) {
    Rng rng(1);
    const auto spec = crime_like_spec(L, 418, false, rng);
    panel = simulate_panel(spec, rng).panel;
    alpha = spec.alpha;
    for (int k : spec.membership) rates.push_back(spec.cluster_rates[static_cast<std::size_t>(k)]);
    theta = spec.theta;
  }
};

template <bool Parallel>
void sweep(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  CountMatrix m = f.panel.counts;
  std::uint64_t s = 0;
  for (auto _ : state) {
    InnovationSweep sw{&f.alpha, &f.rates, &f.theta};
    sw.chain_seed = 7;
    sw.sweep = ++s;
    if constexpr (Parallel) sample_innovations_parallel(f.panel, sw, m);
    else sample_innovations_serial(f.panel, sw, m);
    benchmark::DoNotOptimize(m.values().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 418);
}

}  // namespace

BENCHMARK(sweep<false>)->Name("innovations/serial")->Arg(188)->Arg(1000);
BENCHMARK(sweep<true>)->Name("innovations/openmp")->Arg(188)->Arg(1000);

BENCHMARK_MAIN();
