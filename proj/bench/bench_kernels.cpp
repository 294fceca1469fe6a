#include <benchmark/benchmark.h>

#include "jnp/functional.hpp"
#include "jnp/optimizer.hpp"
#include "jnp/towers.hpp"

using namespace jnp;

namespace {

const TowerSet& u_tower(int depth) {
  static const TowerSet small = TowerSet::build(Schedule::u(2.0), 6);
  static const TowerSet large = TowerSet::build(Schedule::u(2.0), 16);
  return depth <= 6 ? small : large;
}

const TowerSet& g_tower() {
  static const TowerSet g = TowerSet::build(Schedule::g(2.0), 16);
  return g;
}

template <bool Parallel>
void dp_search(benchmark::State& state) {
  const TowerSet& u = u_tower(6);
  BreakpointGrid grid = candidate_grid(u, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    DpResult r = Parallel ? dp_max(u, 2.0, grid) : dp_max_serial(u, 2.0, grid);
    benchmark::DoNotOptimize(r.value);
  }
  state.counters["grid"] = static_cast<double>(grid.size());
}

template <bool Parallel>
void level_sums(benchmark::State& state) {
  const TowerSet& u = u_tower(16);
  for (auto _ : state) {
    auto v = Parallel ? dyadic_level_sums(u, 2.0) : dyadic_level_sums_serial(u, 2.0);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(u.node_count()));
}

template <bool Parallel>
void cover_terms(benchmark::State& state) {
  const TowerSet& g = g_tower();
  const int k = static_cast<int>(state.range(0));
  IntervalGen make = [&g, k](std::uint64_t path) { return cover_interval(g, k, path); };
  for (auto _ : state) {
    auto v = Parallel ? osc_terms(g, g.nodes_at(k), make, 2.0) : osc_terms_serial(g, g.nodes_at(k), make, 2.0);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.nodes_at(k)));
}

}  // namespace

BENCHMARK(dp_search<false>)->Name("dp_search/serial")->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(dp_search<true>)->Name("dp_search/parallel")->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(level_sums<false>)->Name("level_sums/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(level_sums<true>)->Name("level_sums/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(cover_terms<false>)->Name("cover_terms/serial")->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(cover_terms<true>)->Name("cover_terms/parallel")->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
