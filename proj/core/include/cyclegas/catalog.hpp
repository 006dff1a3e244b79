#ifndef CYCLEGAS_CATALOG_HPP
#define CYCLEGAS_CATALOG_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cyclegas/cycle.hpp"
#include "cyclegas/geometry.hpp"
#include "cyclegas/potential.hpp"

namespace cyclegas {

struct Cutoffs {
  int max_length = 4;        // cycles longer than this are excluded
  double max_jump = 1.0;     // Euclidean bound on every jump |sigma(x)-x|
  double min_weight = 0.0;   // cycles lighter than this are excluded
};

struct CatalogEntry {
  Cycle cycle;
  double weight;  // exp(-alpha * energy), in (0,1]
};

// Weighted list of admissible cycles. In anchored form each entry is one
// translation class, rotated so its lex-min site sits at the origin; every
// other admissible cycle is a translate of exactly one entry. A restricted
// catalog instead lists concrete cycles inside a finite region.
//
// tail_bound certifies the total excluded through-origin mass
// sum_{excluded cycles through 0} |c| w(c); +inf when the single-jump series
// diverges at this alpha.
struct CycleCatalog {
  int dimension = 0;
  Cutoffs cutoffs;
  std::string potential_id;
  double alpha = 0.0;
  double tail_bound = 0.0;
  bool anchored = true;
  std::vector<CatalogEntry> entries;

  std::size_t size() const { return entries.size(); }
};

// Jumps y != 0 inside the Euclidean ball of radius max_jump with a finite
// potential value, in lex order.
std::vector<Site> admissible_jumps(const Potential& v, double max_jump);

// Enumerates every translation class admissible under the cutoffs and the
// potential's forbidden jumps (weight-0 cycles never enter). Throws
// std::length_error("catalog too large") past max_classes.
CycleCatalog enumerate_cycles(const Potential& v, double alpha, const Cutoffs& cutoffs,
                              std::size_t max_classes = 1000000);

// All cycles whose support contains the origin: each anchored class yields
// |support| distinct translates. Order is deterministic.
std::vector<CatalogEntry> through_origin(const CycleCatalog& catalog);

// Concrete cycles with support inside the region. Anchored input enumerates
// translates; restricted input filters. Whole-lattice regions return the
// catalog unchanged. Throws std::length_error past max_cycles.
CycleCatalog catalog_restrict(const CycleCatalog& catalog, const BoxRegion& region,
                              std::size_t max_cycles = 10000000);

// Line-oriented text format: header key/value lines (floats in hex for exact
// round trips), then one "<cycle> <weight>" line per entry.
void write_catalog(std::ostream& out, const CycleCatalog& catalog);
void write_catalog_file(const std::string& path, const CycleCatalog& catalog);
CycleCatalog read_catalog(std::istream& in);
CycleCatalog read_catalog_file(const std::string& path);

}  // namespace cyclegas

#endif
