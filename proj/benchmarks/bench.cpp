// Microbenchmarks for the hot paths: catalog enumeration, bound evaluation,
// exact finite-volume draws, and clan construction with classification.

#include <benchmark/benchmark.h>

#include "cyclegas/bounds.hpp"
#include "cyclegas/clan.hpp"
#include "cyclegas/loss_network.hpp"
#include "cyclegas/rng.hpp"
#include "cyclegas/sampler.hpp"

using namespace cyclegas;

namespace {

void bm_enumerate_catalog(benchmark::State& state) {
  Potential v = gaussian_potential(2);
  Cutoffs cut{static_cast<int>(state.range(0)), 1.0, 0.0};
  for (auto _ : state) {
    auto catalog = enumerate_cycles(v, 1.0, cut);
    benchmark::DoNotOptimize(catalog.entries.size());
  }
}
BENCHMARK(bm_enumerate_catalog)->Arg(4)->Arg(6)->Arg(8);

void bm_enumerate_catalog_wide(benchmark::State& state) {
  Potential v = gaussian_potential(2);
  Cutoffs cut{4, 2.0, 0.0};
  for (auto _ : state) {
    auto catalog = enumerate_cycles(v, 1.0, cut);
    benchmark::DoNotOptimize(catalog.entries.size());
  }
}
BENCHMARK(bm_enumerate_catalog_wide);

void bm_rho(benchmark::State& state) {
  Potential v = gaussian_potential(2);
  double alpha = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rho(v, alpha));
    alpha += 1e-9;  // defeat caching across iterations
  }
}
BENCHMARK(bm_rho);

void bm_certify(benchmark::State& state) {
  Potential v = gaussian_potential(2);
  auto catalog = enumerate_cycles(v, 2.5, Cutoffs{4, 1.0, 0.0});
  for (auto _ : state) {
    auto cert = certify_subcritical(v, 2.5, &catalog);
    benchmark::DoNotOptimize(cert.has_value());
  }
}
BENCHMARK(bm_certify);

void bm_branching_row(benchmark::State& state) {
  Potential v = gaussian_potential(2);
  auto catalog = enumerate_cycles(v, 2.5, Cutoffs{4, 1.0, 0.0});
  Cycle gamma = canonicalize({Site{0, 0}, Site{1, 0}});
  for (auto _ : state) {
    auto sums = branching_row_sums(catalog, gamma, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(sums.back());
  }
}
BENCHMARK(bm_branching_row)->Arg(2)->Arg(4);

void bm_exact_sample(benchmark::State& state) {
  Potential v = gaussian_potential(2);
  auto anchored = enumerate_cycles(v, 1.0, Cutoffs{4, 1.0, 0.0});
  int r = static_cast<int>(state.range(0));
  auto restricted =
      catalog_restrict(anchored, BoxRegion::box(Site{-r, -r}, Site{r, r}));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto draw = sample_g_lambda_exact(restricted, stream_key(9000, {seed++}));
    benchmark::DoNotOptimize(draw.sigma.cycles.size());
  }
}
BENCHMARK(bm_exact_sample)->Arg(1)->Arg(2)->Arg(3);

void bm_clan_draw(benchmark::State& state) {
  PreparedSampler prep =
      prepare_sampler(gaussian_potential(2), 1.0 + 0.5 * static_cast<double>(state.range(0)),
                      Cutoffs{4, 1.0, 0.0}, SampleOptions{1000000, true});
  auto window = BoxRegion::box(Site{-1, -1}, Site{1, 1});
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto draw = sample_mu_window(prep, window, stream_key(9100, {seed++}),
                                 SampleOptions{1000000, true});
    benchmark::DoNotOptimize(draw.clan_nodes);
  }
}
BENCHMARK(bm_clan_draw)->Arg(1)->Arg(2)->Arg(3);

void bm_clan_statistics(benchmark::State& state) {
  PreparedSampler prep = prepare_sampler(gaussian_potential(2), 2.5, Cutoffs{4, 1.0, 0.0});
  auto window = BoxRegion::box(Site{-1, -1}, Site{1, 1});
  for (auto _ : state) {
    auto stats = clan_statistics(prep, window, 200, 17);
    benchmark::DoNotOptimize(stats.generation_mass.size());
  }
}
BENCHMARK(bm_clan_statistics);

}  // namespace

BENCHMARK_MAIN();
