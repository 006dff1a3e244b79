#ifndef CYCLEGAS_TESTS_ORACLES_HPP
#define CYCLEGAS_TESTS_ORACLES_HPP

// Reference implementations kept deliberately different from the library:
// closed walks instead of canonical class enumeration, permutation tables
// instead of gas states. Slow and simple wins here.

#include <cstddef>
#include <map>
#include <vector>

#include "cyclegas/catalog.hpp"
#include "cyclegas/cycle.hpp"
#include "cyclegas/geometry.hpp"
#include "cyclegas/potential.hpp"

namespace cyclegas::testing {

// Every closed walk from the origin over distinct sites with 2..max_len
// steps, each jump inside the Euclidean ball of radius max_jump and of
// finite energy. One walk per oriented cycle through the origin.
struct OriginCycles {
  double beta = 0.0;                       // sum over walks of length * weight
  std::size_t count = 0;                   // walks found
  std::map<int, std::size_t> count_by_length;
  std::map<int, double> mass_by_length;    // length * weight, binned
};

OriginCycles enumerate_origin_cycles(const Potential& v, double alpha, int max_len,
                                     double max_jump, double min_weight = 0.0);

// All permutations of the box sites whose cycles obey the cutoffs, with
// normalized Gibbs weights. Index 0 is the identity.
struct PermTable {
  std::vector<std::vector<int>> perms;  // site index -> site index
  std::vector<double> probability;

  // Index of a permutation given as cycles on box sites; -1 when absent.
  int find(const std::vector<Cycle>& cycles, const std::vector<Site>& sites) const;
};

PermTable enumerate_box_permutations(const Potential& v, double alpha, const Cutoffs& cutoffs,
                                     const BoxRegion& box);

double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

// TV between empirical counts (summing to n) and a reference distribution.
double empirical_tv(const std::vector<std::size_t>& counts, const std::vector<double>& probability);

}  // namespace cyclegas::testing

#endif
