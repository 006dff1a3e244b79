#ifndef CYCLEGAS_POTENTIAL_HPP
#define CYCLEGAS_POTENTIAL_HPP

#include <limits>
#include <map>
#include <optional>
#include <string>

#include "cyclegas/cycle.hpp"
#include "cyclegas/geometry.hpp"

namespace cyclegas {

inline constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

// Strictly convex single-jump potential V on Z^d with V(0) = 0, V >= 0,
// extended-real valued (infinity encodes a forbidden jump; exp(-a*inf) = 0
// exactly). A potential may carry an accumulated shift vector v, in which
// case it evaluates V_v(y) = base(y+v) - base(v); shifted potentials can be
// pointwise negative, but sums over whole cycles stay positive.
struct Potential {
  enum class Kind { gaussian, power_law, nearest_neighbor, table };

  Kind kind = Kind::gaussian;
  int dimension = 1;
  double scale = 1.0;            // gaussian: V(x) = scale * |x|^2
  int exponent = 2;              // power_law: V(x) = |x|^p, p even, p > 1
  std::map<Site, double> table;  // table: finite support, +inf elsewhere
  Site shift;                    // empty: unshifted

  bool is_shifted() const { return !shift.empty() && !is_zero(shift); }
  double base_value(const Site& x) const;  // ignores the shift
  double operator()(const Site& x) const;
};

Potential gaussian_potential(int dimension, double scale = 1.0);
Potential power_law_potential(int dimension, int exponent);
Potential nearest_neighbor_potential(int dimension);

// Validates V(0)=0, nonnegativity and strict midpoint convexity on all
// collinear integer triples inside the finite support (off-support values
// are +inf, so only interior triples constrain). Throws on violation.
Potential table_potential(int dimension, std::map<Site, double> values);

// Text rows "x_1 ... x_d value"; '#' comments and blank lines skipped.
Potential load_table_potential(const std::string& path, int dimension);

// V_v(y) = V(y+v) - V(v); shifting twice accumulates the vectors.
Potential shifted(const Potential& v, const Site& v_shift);

// Stable identifier recorded in catalog headers and run outputs.
std::string potential_id(const Potential& v);

// Sum of V(sigma(x) - x) over the cycle's stored site order (bit-stable for
// a fixed canonical form). +inf when any jump is forbidden.
double cycle_energy(const Potential& v, const Cycle& c);

// exp(-alpha * cycle_energy); in (0,1) for admissible cycles, exactly 0 for
// forbidden ones. Throws std::invalid_argument on alpha <= 0.
double weight(const Potential& v, double alpha, const Cycle& c);

// weight of the v-shifted potential; equals weight(shifted(v, vshift), ...).
double weight_v(const Potential& v, double alpha, const Cycle& c, const Site& vshift);

// Largest m with V(x) >= m|x|^2 certified structurally: gaussians return
// their scale, everything else returns nullopt.
std::optional<double> strong_convexity_modulus(const Potential& v);

}  // namespace cyclegas

#endif
