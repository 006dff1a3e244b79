#ifndef CYCLEGAS_BOUNDS_HPP
#define CYCLEGAS_BOUNDS_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cyclegas/catalog.hpp"
#include "cyclegas/potential.hpp"

namespace cyclegas {

// Single-jump series rho(V, alpha) = sum_{y != 0} exp(-alpha V(y)), the
// comparison series controlling the cycle mass beta = sum_{c through 0} |c| w(c)
// via beta <= rho/(1-rho)^2 - rho. Certified to ~1e-15 relative accuracy.
// Throws std::domain_error("divergent series") if no finite certificate exists.
double rho(const Potential& v, double alpha);

// Root of r/(1-r)^2 - r = 1 in (0,1); bisected to |f| < 1e-12 and cached.
// Subcriticality holds whenever rho < rho0.
double rho0();

// rho/(1-rho)^2 - rho. Throws std::domain_error("rho out of range") unless
// 0 <= rho < 1.
double beta_upper_from_rho(double rho_value);

enum class BoundMethod { rho_root, gaussian_explicit, beta_truncated, strongly_convex_shift };

const char* bound_method_name(BoundMethod m);

struct AlphaStarBound {
  double value;
  BoundMethod method;
};

// Smallest alpha found with rho(V, alpha) <= rho0, bisected until
// |rho - rho0| < 1e-9; the returned upper endpoint satisfies rho < rho0, so
// every alpha above it is certified subcritical (cycle weights decrease in
// alpha). Throws std::domain_error("no finite bound") when the scan never
// sees rho below rho0.
AlphaStarBound alpha_star_upper_rho(const Potential& v);

// Closed-form bound for V(x) = |x|^2: pi * ((rho0+1)^(1/d) - 1)^(-2), from
// bounding the one-dimensional theta sum by 1 + sqrt(pi/alpha).
AlphaStarBound gaussian_alpha_star_explicit(int dimension);

// For potentials with a certified strong-convexity modulus m:
// alpha*_v(V) <= gaussian_alpha_star_explicit(d) / m, uniformly in the shift
// v. Throws std::domain_error("no modulus") otherwise.
AlphaStarBound alpha_star_shift_strongly_convex(const Potential& v, const Site& vshift);

// Two-sided enclosure of beta: the catalog's through-origin mass is a lower
// bound, plus its certified exclusion tail for the upper end.
struct BetaEstimate {
  double truncated_sum;
  double tail_bound;
  double alpha;
  Cutoffs cutoffs;

  double lower() const { return truncated_sum; }
  double upper() const { return truncated_sum + tail_bound; }
};

// Requires an anchored catalog; throws std::domain_error("divergent tail")
// when the stored tail certificate is infinite.
BetaEstimate beta_truncated(const CycleCatalog& catalog);

// Certified bound on the through-origin mass excluded by the cutoffs:
// length tail sum_{n > L} n rho^n, jump tail sum_{n <= L} n^2 rho_excl rho^(n-1)
// (union bound over which jump leaves the admissible ball), and a crude
// min_weight term sum_{n <= L} n w_min N^(n-1). Returns +inf when rho >= 1.
double excluded_mass_bound(const Potential& v, double alpha, int dimension, const Cutoffs& cutoffs);

// One row of the branching mean matrix m(c, t) = w(t) 1{t incompatible with c}
// over all translates t of catalog classes. Keys are (class index, offset).
struct MeanMatrixRow {
  std::map<std::pair<int, Site>, double> mass;
  double sum() const {
    double s = 0.0;
    for (const auto& kv : mass) s += kv.second;
    return s;
  }
};

MeanMatrixRow mean_matrix_row(const CycleCatalog& catalog, const Cycle& gamma);

// Row sums of m^n starting from gamma, n = 1..steps, via iterated sparse
// row-vector products. Each is bounded by |gamma| * beta_upper^n.
std::vector<double> branching_row_sums(const CycleCatalog& catalog, const Cycle& gamma, int steps);

// Best available beta upper bound at this alpha; nullopt when nothing
// certifies beta < 1.
struct SubcriticalityCertificate {
  double alpha;
  double beta_upper;
  BoundMethod method;
};

std::optional<SubcriticalityCertificate> certify_subcritical(const Potential& v, double alpha,
                                                             const CycleCatalog* catalog = nullptr);

}  // namespace cyclegas

#endif
