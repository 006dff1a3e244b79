#ifndef CYCLEGAS_SAMPLER_HPP
#define CYCLEGAS_SAMPLER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "cyclegas/bounds.hpp"
#include "cyclegas/clan.hpp"
#include "cyclegas/loss_network.hpp"

namespace cyclegas {

struct SampleOptions {
  std::size_t max_clan_nodes = 1000000;
  bool allow_uncertified = false;  // sample anyway when no certificate holds
};

// Catalog and certificate computed once, shared by many replicas.
struct PreparedSampler {
  CycleCatalog anchored;
  bool certified = false;
  SubcriticalityCertificate certificate{};  // valid only when certified
};

// Enumerates the anchored catalog and tries to certify beta < 1. Throws
// std::runtime_error("not certified subcritical") when certification fails
// and allow_uncertified is not set.
PreparedSampler prepare_sampler(const Potential& v, double alpha, const Cutoffs& cutoffs,
                                const SampleOptions& opts = {});

// One window draw from the infinite-volume gas. sigma holds the full cycles
// of every kept cylinder meeting the window (supports may stick out of it);
// restricting sigma to the window is the marginal being sampled.
struct WindowSample {
  Permutation sigma;
  bool certified = false;
  SubcriticalityCertificate certificate{};
  std::size_t clan_nodes = 0;
  int clan_depth = 0;        // max generation, 0 for a root-only or empty clan
  double oldest_birth = 0.0;
};

// Perfect draw of the window marginal: realize the stationary cylinder
// field lazily, explore the ancestor clan of the window's roots, classify,
// and keep the kept roots.
WindowSample sample_mu_window(const PreparedSampler& prep, const BoxRegion& window,
                              std::uint64_t seed, const SampleOptions& opts = {});
WindowSample sample_mu_window(const Potential& v, double alpha, const Cutoffs& cutoffs,
                              const BoxRegion& window, std::uint64_t seed,
                              const SampleOptions& opts = {});

// Window draw for shift boundary conditions: the gas is sampled under the
// shifted potential y -> V(y + shift) - V(shift), and the sample of the
// shifted measure is the composition x -> gas(x) + shift, reported as a
// complete map on the window. For integer-valued V the shifted weights
// collapse to the unshifted ones exactly (the cross terms telescope around
// a closed cycle), so equal seeds return identical gas draws.
struct ShiftedWindowSample {
  WindowSample gas;
  Site shift;
  std::map<Site, Site> composed;  // x -> gas(x) + shift for every window site
};

ShiftedWindowSample sample_mu_v_window(const Potential& v, const Site& shift, double alpha,
                                       const Cutoffs& cutoffs, const BoxRegion& window,
                                       std::uint64_t seed, const SampleOptions& opts = {});
ShiftedWindowSample sample_mu_v_window(const PreparedSampler& prep_v, const Site& shift,
                                       const BoxRegion& window, std::uint64_t seed,
                                       const SampleOptions& opts = {});

// The permutation restricted to a window, as a sorted site map; sites moved
// by no listed cycle are left out (they are fixed points).
std::map<Site, Site> window_map(const std::vector<Cycle>& cycles, const BoxRegion& window);

// Disagreement curve between the full-lattice sample and the finite-volume
// gas on growing boxes [-r, r]^d, coupled through one shared clan per
// replica. A box that swallows the whole clan reproduces the full marginal
// exactly, so the curve hits zero once the boxes outgrow the clans.
struct CouplingPoint {
  int radius;
  std::size_t disagreements;
  std::size_t replicas;
};

std::vector<CouplingPoint> thermodynamic_coupling(const Potential& v, double alpha,
                                                  const Cutoffs& cutoffs, const BoxRegion& window,
                                                  const std::vector<int>& radii,
                                                  std::size_t replicas, std::uint64_t seed,
                                                  const SampleOptions& opts = {});

// Memory-loss curve of the finite-volume chain: the stationary run and a
// run started at time -t_back from a greedy maximal packing share every
// birth after -t_back; the window marginals at time zero are compared.
// Disagreement requires the two runs never to couple, which forces the
// free process to stay nonempty, so counts decay in t_back.
struct MemoryLossPoint {
  double t_back;
  std::size_t disagreements;
  std::size_t replicas;
};

std::vector<MemoryLossPoint> uniqueness_forward_coupling(const CycleCatalog& restricted,
                                                         const BoxRegion& window,
                                                         const std::vector<double>& t_backs,
                                                         std::size_t replicas, std::uint64_t seed);

// Greedy maximal compatible subset of a restricted catalog, in catalog
// order. Used as the extreme initial condition above.
std::vector<Cycle> greedy_packing(const CycleCatalog& restricted);

// Aggregated per-generation statistics over many clans. Site mass is the
// summed support size of the generation's nodes; successive mass ratios
// are dominated by the branching mean, hence by any certified beta bound.
// Batches partition the replicas for batch-means error bars.
struct ClanStatistics {
  std::size_t replicas = 0;
  std::size_t clans_capped = 0;
  std::vector<double> generation_mass;           // summed over replicas
  std::vector<double> generation_count;          // nodes per generation
  std::vector<std::vector<double>> batch_mass;   // [batch][generation]
  std::map<std::size_t, std::size_t> size_histogram;   // clan node count -> clans
  std::map<int, std::size_t> depth_histogram;          // max generation -> clans
  int max_spatial_radius = 0;  // max linf distance of clan supports from origin
};

ClanStatistics clan_statistics(const PreparedSampler& prep, const BoxRegion& window,
                               std::size_t replicas, std::uint64_t seed,
                               const SampleOptions& opts = {}, std::size_t batches = 20);

}  // namespace cyclegas

#endif
