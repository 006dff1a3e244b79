#ifndef CYCLEGAS_LOSS_NETWORK_HPP
#define CYCLEGAS_LOSS_NETWORK_HPP

#include <cstdint>
#include <vector>

#include "cyclegas/free_process.hpp"

namespace cyclegas {

// Result of filtering a free-process realization through the exclusion rule:
// a birth is accepted iff its support is disjoint from every accepted cycle
// alive at that instant; deaths always happen. Started from an empty state.
struct LossNetworkRun {
  double start = 0.0;
  std::vector<char> accepted;  // per slab point index

  std::vector<int> alive_accepted_at(const FreeProcessSlab& slab, double t) const;
};

// Deterministic sweep (ties broken by birth time, then catalog order).
// Throws std::invalid_argument("not empty at start") if a cylinder is alive
// at `start`.
LossNetworkRun forward_loss_network(const FreeProcessSlab& slab, double start);

// Stationary free-process realization on [t0, 0] obtained by unrolling the
// reversed chain (the free process is reversible, so its past is again a
// Markov birth-death chain) until the set of cylinders straddling the
// current depth empties at a depth of at least t_min. t0 is that empty
// instant: no cylinder is alive at t0 and every cylinder alive in (t0, 0]
// is present with its true birth and death. Exploration past `horizon`
// time units throws std::length_error("backward horizon cap exceeded").
FreeProcessSlab reversed_stationary_slab(const CycleCatalog& restricted, std::uint64_t seed,
                                         double t_min = 0.0, double horizon = 65536.0);

// Exact draw from the finite-volume cycle-gas distribution on a restricted
// catalog: the reversed-chain slab is replayed forward through the
// exclusion filter from its empty left edge, and the accepted cylinders
// alive at time zero form the sample.
struct ExactSample {
  Permutation sigma;
  double empty_time;
  std::size_t cylinder_count;
};

ExactSample sample_g_lambda_exact(const CycleCatalog& restricted, std::uint64_t seed,
                                  double horizon = 65536.0);

// Exhaustive finite-volume reference: all compatible cycle subsets with
// their normalized product weights. States are sorted index sets; state 0 is
// the empty gas. Throws std::length_error("state space too large") past
// max_states.
struct GibbsTable {
  CycleCatalog cycles;
  std::vector<std::vector<int>> states;
  std::vector<double> probability;
  double partition;  // sum of product weights (empty product = 1)

  int find_state(const std::vector<int>& sorted_indices) const;  // -1 if absent
};

GibbsTable enumerate_g_lambda(const CycleCatalog& restricted, std::size_t max_states = 10000000);

// max over (state, compatible cycle) of |P(eta) w(c) - P(eta + c)|; zero in
// exact arithmetic because the gas satisfies detailed balance with unit
// death rates.
double detailed_balance_max_violation(const GibbsTable& table);

}  // namespace cyclegas

#endif
