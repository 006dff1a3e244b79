#ifndef CYCLEGAS_CYCLE_HPP
#define CYCLEGAS_CYCLE_HPP

#include <string>
#include <vector>

#include "cyclegas/geometry.hpp"

namespace cyclegas {

// A finite cycle of distinct sites: the permutation mapping sites[i] to
// sites[i+1 mod n], identity elsewhere. Canonical form fixes the rotation so
// the lexicographically smallest site comes first; orientation is NOT
// normalized, so a cycle and its reversal are distinct objects for n >= 3
// (they are distinct permutations).
struct Cycle {
  std::vector<Site> sites;

  std::size_t length() const { return sites.size(); }
  int dimension() const { return sites.empty() ? 0 : static_cast<int>(sites[0].size()); }

  bool operator==(const Cycle& o) const { return sites == o.sites; }
  bool operator<(const Cycle& o) const;  // lexicographic on the canonical site list
};

// Rotates so the lex-min site is first. Throws std::invalid_argument on
// fewer than two sites ("too short"), repeated sites ("duplicate site"),
// or mixed dimensions.
Cycle canonicalize(std::vector<Site> sites);

Cycle reverse_cycle(const Cycle& c);
Cycle translate(const Cycle& c, const Site& v);

// Sorted (lex) list of the sites the cycle moves.
std::vector<Site> support(const Cycle& c);

// Two cycles are compatible when their supports are disjoint. A cycle is
// incompatible with itself by convention.
bool compatible(const Cycle& a, const Cycle& b);

// Image of x under the cycle (x itself when outside the support).
Site apply_cycle(const Cycle& c, const Site& x);

// "(0,0),(1,0),(1,1)" <-> cycle; used by the catalog text format.
std::string format_cycle(const Cycle& c);
Cycle parse_cycle(const std::string& text, int dimension);

// A finite-support permutation as a set of pairwise compatible cycles; an
// empty set is the identity. Throws on overlapping supports.
struct Permutation {
  std::vector<Cycle> cycles;

  static Permutation identity() { return Permutation{}; }
  static Permutation from_cycles(std::vector<Cycle> cs);

  Site apply(const Site& x) const;
  std::vector<Site> support() const;
  bool is_identity() const { return cycles.empty(); }
};

}  // namespace cyclegas

#endif
