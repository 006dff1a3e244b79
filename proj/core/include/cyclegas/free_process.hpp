#ifndef CYCLEGAS_FREE_PROCESS_HPP
#define CYCLEGAS_FREE_PROCESS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "cyclegas/catalog.hpp"

namespace cyclegas {

// One cylinder of the space-time birth process: a cycle born at `birth`,
// alive on [birth, birth + lifetime). Boundary cylinders enter alive at the
// slab's left edge; their recorded birth is the edge and their true age is
// not stored.
struct CylinderPoint {
  int cycle_index;
  double birth;
  double lifetime;
  bool boundary = false;

  double death() const { return birth + lifetime; }
  bool alive_at(double t) const { return birth <= t && t < death(); }
};

// The free (non-interacting) process on a finite cycle list over [t0, t1]:
// each cycle c independently gains cylinders at rate w(c) with Exp(1)
// lifetimes; the stationary boundary condition at t0 is Poisson(w(c)) alive
// cylinders with Exp(1) residual lifetimes.
struct FreeProcessSlab {
  double t0 = 0.0;
  double t1 = 0.0;
  CycleCatalog cycles;  // restricted (concrete) catalog
  std::vector<CylinderPoint> points;
};

// One named stream per cycle, derived from (seed, cycle hash), so a cycle's
// randomness does not depend on the rest of the catalog.
FreeProcessSlab sample_free_slab(const CycleCatalog& restricted, double t0, double t1,
                                 std::uint64_t seed);

// Earliest time in [t0, t1] with no cylinder alive, or nullopt if the slab
// is covered throughout.
std::optional<double> find_empty_time(const FreeProcessSlab& slab);

}  // namespace cyclegas

#endif
