#include <algorithm>
#include <cmath>
#include <set>

#include "cyclegas/loss_network.hpp"
#include "cyclegas/rng.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace cyclegas;
using namespace cyclegas::testing;

namespace {

CycleCatalog pair_catalog_1d(double alpha) {
  auto v = gaussian_potential(1);
  auto anchored = enumerate_cycles(v, alpha, Cutoffs{2, 1.0, 0.0});
  return catalog_restrict(anchored, BoxRegion::box(Site{0}, Site{1}));
}

CycleCatalog box2x2_catalog(double alpha) {
  auto v = gaussian_potential(2);
  auto anchored = enumerate_cycles(v, alpha, Cutoffs{4, 1.0, 0.0});
  return catalog_restrict(anchored, BoxRegion::box(Site{0, 0}, Site{1, 1}));
}

// Supports of the accepted cylinders alive at t must be pairwise disjoint.
void check_exclusion(const FreeProcessSlab& slab, const LossNetworkRun& run, double t) {
  std::set<Site> occupied;
  for (int idx : run.alive_accepted_at(slab, t)) {
    for (const Site& s : slab.cycles.entries[static_cast<std::size_t>(
             slab.points[static_cast<std::size_t>(idx)].cycle_index)].cycle.sites) {
      CHECK(occupied.insert(s).second);
    }
  }
}

}  // namespace

TEST_CASE("free slab is deterministic in the seed") {
  auto cat = box2x2_catalog(1.0);
  auto a = sample_free_slab(cat, -5.0, 0.0, 77);
  auto b = sample_free_slab(cat, -5.0, 0.0, 77);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].cycle_index == b.points[i].cycle_index);
    CHECK(a.points[i].birth == b.points[i].birth);
    CHECK(a.points[i].lifetime == b.points[i].lifetime);
  }
  auto c = sample_free_slab(cat, -5.0, 0.0, 78);
  bool same = a.points.size() == c.points.size();
  if (same)
    for (std::size_t i = 0; i < a.points.size(); ++i)
      if (a.points[i].birth != c.points[i].birth) same = false;
  CHECK_FALSE(same);
}

TEST_CASE("free slab boundary layer is stationary") {
  // One transposition with weight w: the count alive at t0 is Poisson(w).
  auto cat = pair_catalog_1d(1.0);
  REQUIRE(cat.entries.size() == 1);
  double w = cat.entries[0].weight;
  std::size_t reps = 4000;
  double mean = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    auto slab = sample_free_slab(cat, -1.0, 0.0, 1000 + r);
    for (const auto& p : slab.points)
      if (p.boundary) mean += 1.0;
  }
  mean /= static_cast<double>(reps);
  double sigma = std::sqrt(w / static_cast<double>(reps));
  CHECK(std::abs(mean - w) < 5.0 * sigma);
}

TEST_CASE("empty time finds the first gap") {
  auto cat = pair_catalog_1d(1.0);
  FreeProcessSlab slab;
  slab.t0 = -10.0;
  slab.t1 = 0.0;
  slab.cycles = cat;
  slab.points.push_back({0, -10.0, 2.0, true});
  slab.points.push_back({0, -7.0, 1.5, false});
  CHECK(find_empty_time(slab).value() == -8.0);
  slab.points.push_back({0, -10.0, 12.0, true});
  CHECK_FALSE(find_empty_time(slab).has_value());
}

TEST_CASE("forward sweep respects exclusion at all times") {
  auto cat = box2x2_catalog(0.5);
  auto slab = sample_free_slab(cat, 0.0, 40.0, 9);
  auto run = forward_loss_network(slab, 0.0);
  REQUIRE(run.accepted.size() == slab.points.size());
  for (double t = 0.5; t < 40.0; t += 0.5) check_exclusion(slab, run, t);
  // Acceptance is not all-or-nothing in a crowded slab.
  std::size_t kept = 0;
  for (char a : run.accepted)
    if (a) ++kept;
  CHECK(kept > 0);
  CHECK(kept < slab.points.size());
}

TEST_CASE("forward sweep refuses a covered start") {
  auto cat = pair_catalog_1d(1.0);
  FreeProcessSlab slab;
  slab.t0 = -4.0;
  slab.t1 = 0.0;
  slab.cycles = cat;
  slab.points.push_back({0, -4.0, 1.0, true});
  CHECK_THROWS_AS(forward_loss_network(slab, -3.5), std::invalid_argument);
  CHECK_NOTHROW(forward_loss_network(slab, -4.0));
}

TEST_CASE("reversed slab ends empty and stays ordered") {
  auto cat = box2x2_catalog(1.0);
  for (std::uint64_t seed : {1u, 2u, 3u, 40u, 500u}) {
    auto slab = reversed_stationary_slab(cat, seed);
    CHECK(slab.t1 == 0.0);
    CHECK(slab.t0 <= 0.0);
    for (std::size_t i = 0; i + 1 < slab.points.size(); ++i)
      CHECK(slab.points[i].birth <= slab.points[i + 1].birth);
    // The walk stops on the birth that empties the slab, so the earliest
    // birth sits exactly at t0 and the sweep starts from an empty state.
    for (const auto& p : slab.points) {
      CHECK(p.birth >= slab.t0);
      CHECK(p.death() > p.birth);
    }
    // Everything alive at zero was carried with an open death.
    for (const auto& p : slab.points)
      if (p.alive_at(0.0)) CHECK(std::isinf(p.death()));
  }
}

TEST_CASE("reversed slab extends to a requested depth") {
  auto cat = box2x2_catalog(1.0);
  auto slab = reversed_stationary_slab(cat, 11, 25.0);
  CHECK(slab.t0 <= -25.0);
  auto sweep = forward_loss_network(slab, slab.t0);
  REQUIRE(sweep.accepted.size() == slab.points.size());
}

TEST_CASE("exact sampler is deterministic and valid") {
  auto cat = box2x2_catalog(1.0);
  auto a = sample_g_lambda_exact(cat, 4242);
  auto b = sample_g_lambda_exact(cat, 4242);
  CHECK(a.empty_time == b.empty_time);
  CHECK(a.cylinder_count == b.cylinder_count);
  CHECK(a.sigma.cycles.size() == b.sigma.cycles.size());
  CHECK(a.empty_time < 0.0);
  // The sample is a valid configuration: compatible cycles from the catalog.
  for (std::size_t i = 0; i < a.sigma.cycles.size(); ++i)
    for (std::size_t j = i + 1; j < a.sigma.cycles.size(); ++j)
      CHECK(compatible(a.sigma.cycles[i], a.sigma.cycles[j]));
}

TEST_CASE("enumeration matches the permutation oracle") {
  auto v = gaussian_potential(2);
  Cutoffs cut{4, 1.0, 0.0};
  auto box = BoxRegion::box(Site{0, 0}, Site{1, 1});
  auto cat = catalog_restrict(enumerate_cycles(v, 1.0, cut), box);
  auto table = enumerate_g_lambda(cat);

  // Two transpositions horizontal, two vertical, two square orientations,
  // pairs of parallel transpositions, and the empty state.
  CHECK(table.states.size() == 9);
  CHECK(table.find_state({}) == 0);
  CHECK(table.probability[0] == doctest::Approx(1.0 / table.partition));

  auto oracle = enumerate_box_permutations(v, 1.0, cut, box);
  REQUIRE(oracle.perms.size() == 9);
  auto sites = box.sites();
  std::vector<double> from_states(oracle.probability.size(), 0.0);
  for (std::size_t s = 0; s < table.states.size(); ++s) {
    std::vector<Cycle> cycles;
    for (int idx : table.states[s]) cycles.push_back(cat.entries[static_cast<std::size_t>(idx)].cycle);
    int k = oracle.find(cycles, sites);
    REQUIRE(k >= 0);
    from_states[static_cast<std::size_t>(k)] += table.probability[s];
  }
  CHECK(tv_distance(from_states, oracle.probability) < 1e-12);
}

TEST_CASE("pair swap probability has the closed form") {
  auto cat = pair_catalog_1d(1.0);
  auto table = enumerate_g_lambda(cat);
  REQUIRE(table.states.size() == 2);
  double w = std::exp(-2.0);
  CHECK(table.probability[1] == doctest::Approx(w / (1.0 + w)).epsilon(1e-12));
  CHECK(table.probability[1] == doctest::Approx(0.119202922).epsilon(1e-8));
}

TEST_CASE("detailed balance holds on small tables") {
  auto g2 = enumerate_g_lambda(box2x2_catalog(1.0));
  CHECK(detailed_balance_max_violation(g2) < 1e-12);

  auto v = gaussian_potential(1);
  auto line = catalog_restrict(enumerate_cycles(v, 0.8, Cutoffs{4, 2.0, 0.0}),
                               BoxRegion::box(Site{0}, Site{3}));
  CHECK(detailed_balance_max_violation(enumerate_g_lambda(line)) < 1e-12);

  auto nn = nearest_neighbor_potential(2);
  auto nine = catalog_restrict(enumerate_cycles(nn, 1.0, Cutoffs{4, 1.0, 0.0}),
                               BoxRegion::box(Site{0, 0}, Site{2, 2}));
  auto table = enumerate_g_lambda(nine);
  CHECK(table.states.size() > 9);
  CHECK(detailed_balance_max_violation(table) < 1e-12);
}

TEST_CASE("exact draws match the enumerated distribution") {
  auto cat = box2x2_catalog(1.0);
  auto table = enumerate_g_lambda(cat);
  std::vector<std::size_t> counts(table.states.size(), 0);
  std::size_t reps = 20000;
  for (std::size_t r = 0; r < reps; ++r) {
    auto draw = sample_g_lambda_exact(cat, 100000 + r);
    std::vector<int> state;
    for (const Cycle& c : draw.sigma.cycles) {
      for (int i = 0; i < static_cast<int>(cat.entries.size()); ++i)
        if (cat.entries[static_cast<std::size_t>(i)].cycle == c) state.push_back(i);
    }
    std::sort(state.begin(), state.end());
    int idx = table.find_state(state);
    REQUIRE(idx >= 0);
    ++counts[static_cast<std::size_t>(idx)];
  }
  CHECK(empirical_tv(counts, table.probability) < 0.025);
}
