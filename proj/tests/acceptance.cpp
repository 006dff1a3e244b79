// Release gates for the toolkit. Each numbered criterion prints exactly one
// PASS or FAIL line with the measured values and its pinned tolerance; the
// binary exits nonzero if any gate fails. Everything runs from fixed seeds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cyclegas/bounds.hpp"
#include "cyclegas/clan.hpp"
#include "cyclegas/loss_network.hpp"
#include "cyclegas/rng.hpp"
#include "cyclegas/sampler.hpp"
#include "cyclegas/stats.hpp"
#include "support/oracles.hpp"

using namespace cyclegas;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool report(int n, bool pass, const char* fmt, ...) {
  std::printf("%s criterion %2d: ", pass ? "PASS" : "FAIL", n);
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
  return pass;
}

bool guarded(int n, bool (*fn)()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return report(n, false, "exception: %s", e.what());
  }
}

// 1. Root of the subcriticality cubic.
bool criterion1() {
  auto t0 = Clock::now();
  double r = rho0();
  double secs = seconds_since(t0);
  bool pass = std::abs(r - 0.44504) <= 1e-4 && secs < 1.0;
  return report(1, pass, "rho0 = %.8f, target 0.44504 +- 1e-4, %.3f s", r, secs);
}

// 2. Closed-form gaussian thresholds in d = 2 and d = 3.
bool criterion2() {
  auto t0 = Clock::now();
  double d2 = gaussian_alpha_star_explicit(2).value;
  double d3 = gaussian_alpha_star_explicit(3).value;
  double secs = seconds_since(t0);
  bool pass = std::abs(d2 - 76.9176) <= 0.01 && std::abs(d3 - 184.305) <= 0.01 && secs < 1.0;
  return report(2, pass, "alpha* d=2 %.4f (76.9176 +- 0.01), d=3 %.4f (184.305 +- 0.01), %.3f s",
                d2, d3, secs);
}

double empirical_tv_exact_sampler(const Potential& v, double alpha, const BoxRegion& lambda,
                                  std::size_t draws, std::uint64_t salt) {
  auto anchored = enumerate_cycles(v, alpha, Cutoffs{4, 1.0, 0.0});
  auto restricted = catalog_restrict(anchored, lambda);
  auto table = enumerate_g_lambda(restricted);
  std::map<Cycle, int> index;
  for (int i = 0; i < static_cast<int>(restricted.entries.size()); ++i)
    index[restricted.entries[static_cast<std::size_t>(i)].cycle] = i;

  std::vector<std::size_t> counts(table.states.size(), 0);
  for (std::size_t i = 0; i < draws; ++i) {
    auto draw = sample_g_lambda_exact(restricted, stream_key(424243, {salt, i}));
    std::vector<int> state;
    for (const Cycle& c : draw.sigma.cycles) state.push_back(index.at(c));
    std::sort(state.begin(), state.end());
    int k = table.find_state(state);
    if (k < 0) throw std::logic_error("sampled state missing from enumeration");
    ++counts[static_cast<std::size_t>(k)];
  }
  return testing::empirical_tv(counts, table.probability);
}

// 3. Exact finite-volume sampler against exhaustive enumeration.
bool criterion3() {
  auto t0 = Clock::now();
  const std::size_t draws = 100000;
  double tv1 = empirical_tv_exact_sampler(gaussian_potential(1), 1.0,
                                          BoxRegion::box(Site{0}, Site{1}), draws, 0x31u);
  double tv2 = empirical_tv_exact_sampler(gaussian_potential(2), 1.0,
                                          BoxRegion::box(Site{0, 0}, Site{1, 1}), draws, 0x32u);
  double secs = seconds_since(t0);
  bool pass = tv1 < 0.02 && tv2 < 0.02 && secs < 300.0;
  return report(3, pass, "TV {0,1} %.5f, 2x2 %.5f, bound 0.02, 1e5 draws each, %.1f s", tv1, tv2,
                secs);
}

// 4. Detailed balance on every enumerated table in a representative family.
bool criterion4() {
  struct Case {
    Potential v;
    double alpha;
    BoxRegion lambda;
    Cutoffs cut;
  };
  std::vector<Case> cases;
  cases.push_back({gaussian_potential(1), 1.0, BoxRegion::box(Site{0}, Site{1}), {4, 1.0, 0.0}});
  cases.push_back({gaussian_potential(1), 0.8, BoxRegion::box(Site{0}, Site{3}), {4, 2.0, 0.0}});
  cases.push_back(
      {gaussian_potential(2), 1.0, BoxRegion::box(Site{0, 0}, Site{1, 1}), {4, 1.0, 0.0}});
  cases.push_back(
      {gaussian_potential(2), 1.0, BoxRegion::box(Site{-1, -1}, Site{1, 1}), {4, 1.0, 0.0}});
  cases.push_back({nearest_neighbor_potential(2), 1.5, BoxRegion::box(Site{-1, -1}, Site{1, 1}),
                   {6, 1.0, 0.0}});

  double worst = 0.0;
  std::size_t largest = 0;
  for (const Case& c : cases) {
    auto table = enumerate_g_lambda(catalog_restrict(enumerate_cycles(c.v, c.alpha, c.cut),
                                                     c.lambda));
    if (table.states.size() > 10000) throw std::logic_error("table exceeds the size gate");
    worst = std::max(worst, detailed_balance_max_violation(table));
    largest = std::max(largest, table.states.size());
  }
  bool pass = worst <= 1e-10;
  return report(4, pass, "max violation %.3e over %zu tables (largest %zu states), bound 1e-10",
                worst, cases.size(), largest);
}

// 5. Shift invariance of gaussian cycle weights across a whole catalog.
bool criterion5() {
  Potential v = gaussian_potential(2);
  double alpha = 1.0;
  auto catalog = enumerate_cycles(v, alpha, Cutoffs{6, 2.0, 0.0});
  std::vector<Site> shifts = {Site{1, 0}, Site{1, 1}, Site{3, 0}};
  double worst = 0.0;
  for (const CatalogEntry& e : catalog.entries) {
    double w = weight(v, alpha, e.cycle);
    for (const Site& s : shifts) {
      double wv = weight_v(v, alpha, e.cycle, s);
      worst = std::max(worst, std::abs(wv - w) / w);
    }
  }
  bool pass = worst <= 1e-12;
  return report(5, pass, "max relative |w_v - w| = %.3e over %zu classes x 3 shifts, bound 1e-12",
                worst, catalog.entries.size());
}

// 6. Finite-volume gas agrees with the full gas once the box swallows the clan.
bool criterion6() {
  auto t0 = Clock::now();
  auto window = BoxRegion::box(Site{-1, -1}, Site{1, 1});
  auto curve = thermodynamic_coupling(gaussian_potential(2), 80.0, Cutoffs{4, 1.0, 0.0}, window,
                                      {3, 5, 7, 9}, 1000, 7);
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i)
    if (curve[i + 1].disagreements > curve[i].disagreements) monotone = false;
  double last = static_cast<double>(curve.back().disagreements) /
                static_cast<double>(curve.back().replicas);
  double secs = seconds_since(t0);
  bool pass = monotone && last < 0.01 && secs < 600.0;
  return report(6, pass,
                "disagreement fractions %.4f %.4f %.4f %.4f non-increasing=%d, final bound 0.01, "
                "%.1f s",
                static_cast<double>(curve[0].disagreements) / 1000.0,
                static_cast<double>(curve[1].disagreements) / 1000.0,
                static_cast<double>(curve[2].disagreements) / 1000.0, last, monotone ? 1 : 0,
                secs);
}

// 7. Every clan terminates at a certified alpha and generation mass ratios
// stay under the certified branching bound.
bool criterion7() {
  PreparedSampler prep = prepare_sampler(gaussian_potential(2), 2.5, Cutoffs{4, 1.0, 0.0});
  auto window = BoxRegion::box(Site{-1, -1}, Site{1, 1});
  ClanStatistics stats = clan_statistics(prep, window, 10000, 99);
  double beta = prep.certificate.beta_upper;

  bool ratios_ok = true;
  double worst_ratio = 0.0, worst_allowance = 0.0;
  for (std::size_t g = 0; g + 1 < stats.generation_mass.size(); ++g) {
    std::vector<double> batch_ratios;
    for (const auto& batch : stats.batch_mass)
      if (batch.size() > g && batch[g] > 0.0)
        batch_ratios.push_back(batch.size() > g + 1 ? batch[g + 1] / batch[g] : 0.0);
    if (batch_ratios.size() < 10) continue;  // too few populated batches to judge
    double pooled = stats.generation_mass[g + 1] / stats.generation_mass[g];
    double mean = 0.0;
    for (double r : batch_ratios) mean += r;
    mean /= static_cast<double>(batch_ratios.size());
    double var = 0.0;
    for (double r : batch_ratios) var += (r - mean) * (r - mean);
    var /= static_cast<double>(batch_ratios.size() - 1);
    double sigma = std::sqrt(var / static_cast<double>(batch_ratios.size()));
    double allowance = beta + 3.0 * sigma;
    if (pooled > allowance) ratios_ok = false;
    if (pooled - worst_ratio > 0.0) {
      worst_ratio = pooled;
      worst_allowance = allowance;
    }
  }
  bool pass = stats.clans_capped == 0 && ratios_ok;
  return report(7, pass,
                "10000 clans, %zu capped, worst mass ratio %.4f vs beta_upper+3sigma %.4f",
                stats.clans_capped, worst_ratio, worst_allowance);
}

// 8. Mean jump of the window marginal: 0 under identity conditions, v under
// shift conditions, both within three standard errors.
bool criterion8() {
  auto window = BoxRegion::box(Site{-1, -1}, Site{1, 1});
  Cutoffs cut{4, 1.0, 0.0};
  const std::size_t n = 10000;

  PreparedSampler prep = prepare_sampler(gaussian_potential(2), 2.5, cut);
  std::vector<std::map<Site, Site>> plain(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto draw = sample_mu_window(prep, window, stream_key(1234, {0xaaau, i}));
    plain[i] = window_map(draw.sigma.cycles, window);
  }
  MeanJump mj0 = mean_jump(plain, window);

  Site e1{1, 0};
  PreparedSampler prep_v =
      prepare_sampler(shifted(gaussian_potential(2), e1), 2.5, cut);
  std::vector<std::map<Site, Site>> shifted_maps(n);
  for (std::size_t i = 0; i < n; ++i)
    shifted_maps[i] = sample_mu_v_window(prep_v, e1, window, stream_key(1234, {0xbbbu, i})).composed;
  MeanJump mjv = mean_jump(shifted_maps, window);

  bool pass0 = std::abs(mj0.mean[0]) <= 3.0 * mj0.sigma[0] &&
               std::abs(mj0.mean[1]) <= 3.0 * mj0.sigma[1];
  bool passv = std::abs(mjv.mean[0] - 1.0) <= 3.0 * mjv.sigma[0] &&
               std::abs(mjv.mean[1]) <= 3.0 * mjv.sigma[1];
  return report(8, pass0 && passv,
                "identity (%.5f,%.5f) sigma (%.5f,%.5f); shift e1 (%.5f,%.5f) sigma (%.5f,%.5f); "
                "1e4 draws each",
                mj0.mean[0], mj0.mean[1], mj0.sigma[0], mj0.sigma[1], mjv.mean[0], mjv.mean[1],
                mjv.sigma[0], mjv.sigma[1]);
}

// 9. Chronological sweep of a materialized slab against the lazy backward
// classification on the shared realization.
bool criterion9() {
  Potential v = gaussian_potential(2);
  double alpha = 1.5;
  auto anchored = enumerate_cycles(v, alpha, Cutoffs{4, 1.0, 0.0});
  auto lambda = BoxRegion::box(Site{-2, -2}, Site{2, 2});
  auto window = BoxRegion::box(Site{-1, -1}, Site{1, 1});
  auto restricted = catalog_restrict(anchored, lambda);

  std::size_t agreements = 0;
  const std::size_t replicas = 1000;
  for (std::uint64_t seed = 1; seed <= replicas; ++seed) {
    auto slab = reversed_stationary_slab(restricted, seed);
    auto run = forward_loss_network(slab, slab.t0);
    std::multiset<std::string> swept;
    for (int idx : run.alive_accepted_at(slab, 0.0)) {
      const Cycle& c =
          slab.cycles.entries[static_cast<std::size_t>(
                                  slab.points[static_cast<std::size_t>(idx)].cycle_index)]
              .cycle;
      for (const Site& s : c.sites)
        if (window.contains(s)) {
          swept.insert(format_cycle(c));
          break;
        }
    }

    CylinderField field(anchored, slab);
    Clan clan = build_clan(field, window);
    std::multiset<std::string> lazy;
    for (const Cycle& c : kept_root_cycles(clan, classify(clan))) lazy.insert(format_cycle(c));
    if (lazy == swept) ++agreements;
  }
  bool pass = agreements == replicas;
  return report(9, pass, "slab sweep vs lazy classification: %zu/%zu seeds identical", agreements,
                replicas);
}

// 10. Exhaustive longer enumeration lands inside the shorter enclosure.
bool criterion10() {
  Potential v = nearest_neighbor_potential(2);
  double alpha = 2.5;
  auto exhaustive = testing::enumerate_origin_cycles(v, alpha, 8, 1.0);
  auto catalog = enumerate_cycles(v, alpha, Cutoffs{6, 1.0, 0.0});
  BetaEstimate est = beta_truncated(catalog);
  bool pass = est.lower() <= exhaustive.beta && exhaustive.beta <= est.upper();
  return report(10, pass, "beta(L=8) %.9f inside [%.9f, %.9f] from L=6 (%zu walks)",
                exhaustive.beta, est.lower(), est.upper(), exhaustive.count);
}

// 11. Unit-jump cycles on the square lattice alternate between sublattices,
// so odd lengths never enumerate.
bool criterion11() {
  struct Case {
    Potential v;
    double alpha;
    int max_length;
  };
  std::vector<Case> cases;
  cases.push_back({gaussian_potential(2), 0.5, 7});
  cases.push_back({gaussian_potential(2), 1.0, 5});
  cases.push_back({gaussian_potential(2), 2.5, 7});
  cases.push_back({nearest_neighbor_potential(2), 1.0, 7});
  cases.push_back({nearest_neighbor_potential(2), 2.5, 5});
  cases.push_back({power_law_potential(2, 4), 1.0, 7});

  std::size_t odd = 0, total = 0;
  for (const Case& c : cases) {
    auto catalog = enumerate_cycles(c.v, c.alpha, Cutoffs{c.max_length, 1.0, 0.0});
    total += catalog.entries.size();
    for (const CatalogEntry& e : catalog.entries)
      if (e.cycle.length() % 2 == 1) ++odd;
  }
  bool pass = odd == 0;
  return report(11, pass, "%zu odd-length classes across %zu enumerated classes at R_max=1", odd,
                total);
}

}  // namespace

int main() {
  bool ok = true;
  ok &= guarded(1, criterion1);
  ok &= guarded(2, criterion2);
  ok &= guarded(3, criterion3);
  ok &= guarded(4, criterion4);
  ok &= guarded(5, criterion5);
  ok &= guarded(6, criterion6);
  ok &= guarded(7, criterion7);
  ok &= guarded(8, criterion8);
  ok &= guarded(9, criterion9);
  ok &= guarded(10, criterion10);
  ok &= guarded(11, criterion11);
  std::printf("%s\n", ok ? "all criteria passed" : "some criteria FAILED");
  return ok ? 0 : 1;
}
