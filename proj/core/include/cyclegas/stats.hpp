#ifndef CYCLEGAS_STATS_HPP
#define CYCLEGAS_STATS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cyclegas/cycle.hpp"
#include "cyclegas/geometry.hpp"

namespace cyclegas {

struct MeanJump {
  std::vector<double> mean;   // per coordinate
  std::vector<double> sigma;  // batch-means standard error per coordinate
  std::size_t samples = 0;
  std::size_t batches = 0;
};

// Average of sigma(x) - x over window sites and replicas. Each sample is a
// site map as produced by window_map or a composed shift sample; window
// sites missing from a map count as fixed points. The error bar comes from
// near-equal consecutive batches of replicas. Throws
// std::invalid_argument("too few samples") given fewer than two samples.
MeanJump mean_jump(const std::vector<std::map<Site, Site>>& samples, const BoxRegion& window,
                   std::size_t batches = 20);

// Window sites binned by the length of the cycle containing them; sites on
// no cycle land in the length-1 bin, so the total mass is always
// |window| * samples.
std::map<int, std::uint64_t> cycle_length_histogram(const std::vector<std::vector<Cycle>>& samples,
                                                    const BoxRegion& window);

// Fraction of (window site, replica) pairs lying on some cycle.
double moved_fraction(const std::vector<std::vector<Cycle>>& samples, const BoxRegion& window);

// One named curve destined for a CSV file.
struct PlotTable {
  std::string name;  // file stem of <name>.csv
  std::string description;
  std::vector<std::string> comments;  // leading '#' lines (provenance)
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Writes <name>.csv per table plus a plotdata.schema.txt sidecar listing
// each file's columns. Numbers carry 17 significant digits, so a rerun
// with the same data is byte-identical. Throws std::runtime_error on
// unwritable paths.
void emit_plotdata(const std::string& directory, const std::vector<PlotTable>& tables);

}  // namespace cyclegas

#endif
