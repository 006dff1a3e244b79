#ifndef CYCLEGAS_CLAN_HPP
#define CYCLEGAS_CLAN_HPP

#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "cyclegas/free_process.hpp"

namespace cyclegas {

// A concrete cycle named by its translation class and lattice offset.
struct TypeKey {
  int class_index = 0;
  Site offset;
};

inline bool operator==(const TypeKey& a, const TypeKey& b) {
  return a.class_index == b.class_index && a.offset == b.offset;
}
inline bool operator<(const TypeKey& a, const TypeKey& b) {
  if (a.class_index != b.class_index) return a.class_index < b.class_index;
  return a.offset < b.offset;
}

// One realized cylinder of the stationary field. Pane -1 holds the
// cylinders still alive at time zero (death is recorded as +inf, which is
// only valid for queries at times <= 0); pane k >= 0 holds those dying in
// [-k-1, -k). `index` is the draw position inside its (type, pane) batch,
// so the triple (type, pane, index) identifies a cylinder across queries.
struct FieldCylinder {
  TypeKey type;
  int pane = 0;
  int index = 0;
  double birth = 0.0;
  double death = 0.0;
};

// The stationary free process over every translate of an anchored catalog,
// realized lazily one (type, pane) batch at a time. Each batch is a fixed
// function of (seed, class, offset, pane), so the realization does not
// depend on query order or on the window being sampled; enlarging the
// window only reveals more of the same field. Deaths of a type form a
// Poisson process of rate w on the time axis, births sit an Exp(1)
// lifetime earlier, and the alive-at-zero layer is Poisson(w) cylinders
// with Exp(1) age.
class CylinderField {
 public:
  CylinderField(const CycleCatalog& anchored, std::uint64_t seed);

  // Wraps an explicit slab realization started empty at slab.t0 (boundary
  // cylinders are rejected). Used to cross-check clan classification
  // against the chronological sweep on the same points.
  CylinderField(const CycleCatalog& anchored, const FreeProcessSlab& slab);

  const CycleCatalog& classes() const { return classes_; }
  int dimension() const { return classes_.dimension; }

  Cycle concrete_cycle(const TypeKey& type) const;
  double type_weight(const TypeKey& type) const;

  // Appends every cylinder of `type` alive at time t (birth <= t < death).
  // The lazy field only answers for t <= 0.
  void append_alive_at(const TypeKey& type, double t, std::vector<FieldCylinder>& out) const;

  std::size_t realized_batches() const { return lazy_ ? cache_.size() : 0; }

 private:
  const std::vector<FieldCylinder>& batch(int class_index, const Site& offset, int pane) const;

  CycleCatalog classes_;
  bool lazy_ = true;
  std::uint64_t seed_ = 0;
  mutable std::map<std::tuple<int, Site, int>, std::vector<FieldCylinder>> cache_;
  std::map<TypeKey, std::vector<FieldCylinder>> slab_points_;
};

struct ClanNode {
  FieldCylinder cyl;
  Cycle cycle;               // concrete support, class translated by offset
  std::vector<int> parents;  // cylinders overlapping this one, alive at its birth
};

// Ancestor clan of the cylinders alive at time zero whose support meets a
// window. Nodes appear in discovery order (roots first), and every node's
// parent list is complete: it holds each strictly older overlapping
// cylinder alive at the node's birth.
struct Clan {
  std::vector<ClanNode> nodes;
  std::vector<int> roots;
};

// Every type whose support meets the box, sorted.
std::vector<TypeKey> types_meeting(const CycleCatalog& anchored, const BoxRegion& window);

// Backward exploration from the window's roots. The clan is almost surely
// finite in the subcritical regime; growth past max_nodes throws
// std::length_error("clan node cap exceeded").
Clan build_clan(const CylinderField& field, const BoxRegion& window,
                std::size_t max_nodes = 1000000);

// Generation of every node: least parent-distance from a root (roots are
// generation 0). Parents are strictly older than their children, so the
// relation is acyclic and a breadth-first sweep settles every node.
std::vector<int> clan_generations(const Clan& clan);

// Kept/deleted fate of every node, resolved oldest birth first: a cylinder
// is kept exactly when none of its parents was kept.
std::vector<char> classify(const Clan& clan);

// Same rule with every cylinder not fully inside `region` erased from the
// process. The surviving fates are the finite-volume gas on `region`,
// coupled to the full-lattice one through the shared realization.
std::vector<char> classify_restricted(const Clan& clan, const BoxRegion& region);

// Cycles of the kept roots: the gas at time zero as seen from the window.
std::vector<Cycle> kept_root_cycles(const Clan& clan, const std::vector<char>& kept);

}  // namespace cyclegas

#endif
