#ifndef CYCLEGAS_CONFIG_HPP
#define CYCLEGAS_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cyclegas/catalog.hpp"
#include "cyclegas/potential.hpp"

namespace cyclegas {

// One flat run description shared by every subcommand. Unset sites and
// lists serialize as "none". The canonical serialization fixes key order
// and full-precision number formatting, so equal configs hash equally and
// rerun outputs are byte-stable.
struct RunConfig {
  int dimension = 2;
  std::string potential = "gaussian";  // gaussian | nearest_neighbor | powerlaw | table
  double scale = 1.0;                  // gaussian prefactor
  int exponent = 4;                    // powerlaw exponent
  std::string table_path;             // table potential data file
  double alpha = 1.0;
  double alpha_min = 0.0;             // bounds subcommand: alpha grid
  double alpha_max = 0.0;
  int alpha_steps = 0;                // > 0 activates the grid
  Site shift;                          // empty: identity boundary conditions
  Site window_lo, window_hi;           // sampling window corners
  Site lambda_lo, lambda_hi;           // finite-volume box corners
  std::vector<int> radii;              // nested coupling boxes [-r, r]^d
  std::vector<double> t_backs;         // memory-loss grid
  Cutoffs cutoffs;
  std::uint64_t replicas = 100;
  std::uint64_t seed = 1;
  bool allow_uncertified = false;
  std::uint64_t max_clan_nodes = 1000000;
  int threads = 1;
  bool compare_oracle = false;         // sample-finite: report TV vs enumeration
  std::string out;                     // output directory; empty: env or cwd
};

// Applies one "key = value" assignment. Unknown keys and malformed values
// throw std::invalid_argument naming the key.
void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value);

// Key-value lines over `base`; '#' starts a comment, blank lines skipped.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig read_config_file(const std::string& path, RunConfig base = {});

// Canonical text form: every key once, fixed order, 17-digit numbers.
// Parsing it back reproduces the config exactly.
std::string serialize_config(const RunConfig& cfg);

std::uint64_t config_hash(const RunConfig& cfg);

// Static sanity checks (dimensions, box corners, cutoffs, counts); throws
// std::invalid_argument. Subcommand-specific requirements live with the
// subcommands.
void validate_config(const RunConfig& cfg);

// Builds the configured potential, loading the table file when needed.
Potential make_potential(const RunConfig& cfg);

BoxRegion config_window(const RunConfig& cfg);  // throws if corners unset
BoxRegion config_lambda(const RunConfig& cfg);

}  // namespace cyclegas

#endif
