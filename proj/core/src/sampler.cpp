#include "cyclegas/sampler.hpp"

#include <algorithm>
#include <stdexcept>

#include "cyclegas/rng.hpp"

namespace cyclegas {

PreparedSampler prepare_sampler(const Potential& v, double alpha, const Cutoffs& cutoffs,
                                const SampleOptions& opts) {
  PreparedSampler prep;
  prep.anchored = enumerate_cycles(v, alpha, cutoffs);
  std::optional<SubcriticalityCertificate> cert = certify_subcritical(v, alpha, &prep.anchored);
  if (cert) {
    prep.certified = true;
    prep.certificate = *cert;
  } else if (!opts.allow_uncertified) {
    throw std::runtime_error("not certified subcritical");
  }
  return prep;
}

WindowSample sample_mu_window(const PreparedSampler& prep, const BoxRegion& window,
                              std::uint64_t seed, const SampleOptions& opts) {
  if (window.whole_lattice) throw std::invalid_argument("sample_mu_window: window must be a finite box");
  CylinderField field(prep.anchored, seed);
  Clan clan = build_clan(field, window, opts.max_clan_nodes);
  std::vector<char> kept = classify(clan);

  WindowSample out;
  out.sigma = Permutation::from_cycles(kept_root_cycles(clan, kept));
  out.certified = prep.certified;
  out.certificate = prep.certificate;
  out.clan_nodes = clan.nodes.size();
  for (int g : clan_generations(clan)) out.clan_depth = std::max(out.clan_depth, g);
  out.oldest_birth = 0.0;
  for (const ClanNode& n : clan.nodes) out.oldest_birth = std::min(out.oldest_birth, n.cyl.birth);
  return out;
}

WindowSample sample_mu_window(const Potential& v, double alpha, const Cutoffs& cutoffs,
                              const BoxRegion& window, std::uint64_t seed,
                              const SampleOptions& opts) {
  return sample_mu_window(prepare_sampler(v, alpha, cutoffs, opts), window, seed, opts);
}

ShiftedWindowSample sample_mu_v_window(const PreparedSampler& prep_v, const Site& shift,
                                       const BoxRegion& window, std::uint64_t seed,
                                       const SampleOptions& opts) {
  ShiftedWindowSample out;
  out.gas = sample_mu_window(prep_v, window, seed, opts);
  out.shift = shift;
  std::map<Site, Site> gas_map = window_map(out.gas.sigma.cycles, window);
  for (const Site& x : window.sites()) {
    auto it = gas_map.find(x);
    out.composed.emplace(x, add(it == gas_map.end() ? x : it->second, shift));
  }
  return out;
}

ShiftedWindowSample sample_mu_v_window(const Potential& v, const Site& shift, double alpha,
                                       const Cutoffs& cutoffs, const BoxRegion& window,
                                       std::uint64_t seed, const SampleOptions& opts) {
  return sample_mu_v_window(prepare_sampler(shifted(v, shift), alpha, cutoffs, opts), shift,
                            window, seed, opts);
}

std::map<Site, Site> window_map(const std::vector<Cycle>& cycles, const BoxRegion& window) {
  std::map<Site, Site> out;
  for (const Cycle& c : cycles) {
    const std::size_t n = c.sites.size();
    for (std::size_t i = 0; i < n; ++i)
      if (window.contains(c.sites[i])) {
        if (!out.emplace(c.sites[i], c.sites[(i + 1) % n]).second)
          throw std::invalid_argument("window_map: overlapping cycles");
      }
  }
  return out;
}

std::vector<CouplingPoint> thermodynamic_coupling(const Potential& v, double alpha,
                                                  const Cutoffs& cutoffs, const BoxRegion& window,
                                                  const std::vector<int>& radii,
                                                  std::size_t replicas, std::uint64_t seed,
                                                  const SampleOptions& opts) {
  if (window.whole_lattice)
    throw std::invalid_argument("thermodynamic_coupling: window must be a finite box");
  PreparedSampler prep = prepare_sampler(v, alpha, cutoffs, opts);

  const int d = prep.anchored.dimension;
  std::vector<CouplingPoint> curve;
  for (int r : radii) curve.push_back(CouplingPoint{r, 0, replicas});

  for (std::size_t rep = 0; rep < replicas; ++rep) {
    CylinderField field(prep.anchored, stream_key(seed, {0xc091eu, static_cast<std::uint64_t>(rep)}));
    Clan clan = build_clan(field, window, opts.max_clan_nodes);
    std::map<Site, Site> full = window_map(kept_root_cycles(clan, classify(clan)), window);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      BoxRegion box = BoxRegion::box(Site(static_cast<std::size_t>(d), Coord(-radii[i])),
                                     Site(static_cast<std::size_t>(d), Coord(radii[i])));
      std::map<Site, Site> part =
          window_map(kept_root_cycles(clan, classify_restricted(clan, box)), window);
      if (part != full) ++curve[i].disagreements;
    }
  }
  return curve;
}

std::vector<Cycle> greedy_packing(const CycleCatalog& restricted) {
  std::vector<Cycle> packed;
  for (const CatalogEntry& e : restricted.entries) {
    bool ok = true;
    for (const Cycle& c : packed)
      if (!compatible(c, e.cycle)) {
        ok = false;
        break;
      }
    if (ok) packed.push_back(e.cycle);
  }
  return packed;
}

std::vector<MemoryLossPoint> uniqueness_forward_coupling(const CycleCatalog& restricted,
                                                         const BoxRegion& window,
                                                         const std::vector<double>& t_backs,
                                                         std::size_t replicas, std::uint64_t seed) {
  if (restricted.anchored)
    throw std::invalid_argument("uniqueness_forward_coupling: needs a restricted catalog");
  if (t_backs.empty()) throw std::invalid_argument("uniqueness_forward_coupling: empty t_back grid");
  double t_max = 0.0;
  for (double t : t_backs) {
    if (t <= 0.0) throw std::invalid_argument("uniqueness_forward_coupling: t_back must be positive");
    t_max = std::max(t_max, t);
  }

  std::vector<Cycle> packing = greedy_packing(restricted);
  std::vector<int> packing_index;
  for (const Cycle& c : packing) {
    auto it = std::find_if(restricted.entries.begin(), restricted.entries.end(),
                           [&](const CatalogEntry& e) { return e.cycle == c; });
    packing_index.push_back(static_cast<int>(it - restricted.entries.begin()));
  }

  std::vector<MemoryLossPoint> curve;
  for (double t : t_backs) curve.push_back(MemoryLossPoint{t, 0, replicas});

  for (std::size_t rep = 0; rep < replicas; ++rep) {
    FreeProcessSlab slab = reversed_stationary_slab(
        restricted, stream_key(seed, {0x1055u, static_cast<std::uint64_t>(rep)}), t_max);
    LossNetworkRun stationary = forward_loss_network(slab, slab.t0);
    std::vector<Cycle> at_zero;
    for (int i : stationary.alive_accepted_at(slab, 0.0))
      at_zero.push_back(
          slab.cycles.entries[static_cast<std::size_t>(slab.points[static_cast<std::size_t>(i)].cycle_index)]
              .cycle);
    std::map<Site, Site> target = window_map(at_zero, window);

    for (std::size_t i = 0; i < t_backs.size(); ++i) {
      const double t0 = -t_backs[i];
      FreeProcessSlab started;
      started.t0 = t0;
      started.t1 = 0.0;
      started.cycles = restricted;
      RngStream lifetimes(stream_key(
          seed, {0xe7a0u, static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(i)}));
      for (std::size_t k = 0; k < packing_index.size(); ++k)
        started.points.push_back(
            CylinderPoint{packing_index[k], t0, lifetimes.exponential(1.0), true});
      for (const CylinderPoint& p : slab.points)
        if (p.birth >= t0) started.points.push_back(p);
      LossNetworkRun run = forward_loss_network(started, t0);
      std::vector<Cycle> cycles;
      for (int k : run.alive_accepted_at(started, 0.0))
        cycles.push_back(
            started.cycles
                .entries[static_cast<std::size_t>(started.points[static_cast<std::size_t>(k)].cycle_index)]
                .cycle);
      if (window_map(cycles, window) != target) ++curve[i].disagreements;
    }
  }
  return curve;
}

ClanStatistics clan_statistics(const PreparedSampler& prep, const BoxRegion& window,
                               std::size_t replicas, std::uint64_t seed,
                               const SampleOptions& opts, std::size_t batches) {
  if (batches == 0 || batches > replicas) batches = std::max<std::size_t>(1, replicas);

  ClanStatistics out;
  out.replicas = replicas;
  out.batch_mass.assign(batches, {});

  for (std::size_t rep = 0; rep < replicas; ++rep) {
    CylinderField field(prep.anchored, stream_key(seed, {0x9e4e5u, static_cast<std::uint64_t>(rep)}));
    Clan clan;
    try {
      clan = build_clan(field, window, opts.max_clan_nodes);
    } catch (const std::length_error&) {
      ++out.clans_capped;
      continue;
    }

    std::vector<int> gen = clan_generations(clan);
    std::vector<double>& batch = out.batch_mass[rep * batches / replicas];
    int depth = 0;
    for (std::size_t i = 0; i < clan.nodes.size(); ++i) {
      const std::size_t g = static_cast<std::size_t>(gen[i]);
      depth = std::max(depth, gen[i]);
      if (g >= out.generation_mass.size()) {
        out.generation_mass.resize(g + 1, 0.0);
        out.generation_count.resize(g + 1, 0.0);
      }
      if (g >= batch.size()) batch.resize(g + 1, 0.0);
      const double mass = static_cast<double>(clan.nodes[i].cycle.sites.size());
      out.generation_mass[g] += mass;
      out.generation_count[g] += 1.0;
      batch[g] += mass;
      for (const Site& s : clan.nodes[i].cycle.sites)
        out.max_spatial_radius = std::max(out.max_spatial_radius, static_cast<int>(linf(s)));
    }
    ++out.size_histogram[clan.nodes.size()];
    ++out.depth_histogram[clan.nodes.empty() ? 0 : depth];
  }
  return out;
}

}  // namespace cyclegas
