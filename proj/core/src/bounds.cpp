#include "cyclegas/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace cyclegas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-dimensional theta sum 1 + 2 sum_{k>=1} exp(-a k^2), reported as an
// upper bound (a certified geometric tail closes the sum).
double theta_sum_upper(double a) {
  double acc = 1.0;
  for (int k = 1; k < 100000000; ++k) {
    double term = 2.0 * std::exp(-a * static_cast<double>(k) * k);
    acc += term;
    if (term < 1e-18 * acc) {
      double next = 2.0 * std::exp(-a * static_cast<double>(k + 1) * (k + 1));
      double ratio = std::exp(-a * (2.0 * k + 3.0));
      if (ratio < 1.0) acc += next / (1.0 - ratio);
      return acc;
    }
  }
  throw std::domain_error("divergent series");
}

// Quadratic potentials have the same cycle weights under any shift (the
// cross terms telescope around a closed cycle), so their tail and
// subcriticality certificates may use the unshifted series.
Potential tail_equivalent(const Potential& v) {
  if (v.kind == Potential::Kind::gaussian && v.is_shifted()) {
    Potential base = v;
    base.shift.clear();
    return base;
  }
  return v;
}

double int_pow(double x, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

// Sites of the L-infinity shell of radius m, visited in lex order.
template <typename F>
void for_each_shell_site(int dimension, Coord m, F&& f) {
  Site cur(static_cast<std::size_t>(dimension), -m);
  while (true) {
    if (linf(cur) == m) f(cur);
    std::size_t k = cur.size();
    bool done = true;
    while (k > 0) {
      --k;
      if (cur[k] < m) {
        ++cur[k];
        for (std::size_t j = k + 1; j < cur.size(); ++j) cur[j] = -m;
        done = false;
        break;
      }
    }
    if (done) return;
  }
}

double rho_power_law(const Potential& v, double alpha) {
  const int d = v.dimension;
  const int p = v.exponent;
  const double s = v.is_shifted() ? std::sqrt(static_cast<double>(norm2(v.shift))) : 0.0;
  const double sp = int_pow(s, p);
  double acc = 0.0;
  for (Coord m = 1; m < 100000; ++m) {
    double shell = 0.0;
    for_each_shell_site(d, m, [&](const Site& y) {
      if (!is_zero(y)) shell += std::exp(-alpha * v(y));
    });
    acc += shell;
    if (static_cast<double>(m) <= s + 1.0) continue;
    // Remaining shells: |y+v| >= |y|_inf - |v|, so each site of shell r
    // contributes at most exp(-alpha ((r-s)^p - s^p)); shell size is below
    // 2d (2r+1)^(d-1). Close with a geometric bound once the ratio drops.
    auto shell_bound = [&](double r) {
      return 2.0 * d * int_pow(2.0 * r + 1.0, d - 1) * std::exp(-alpha * (int_pow(r - s, p) - sp));
    };
    double b1 = shell_bound(m + 1.0);
    double ratio = shell_bound(m + 2.0) / b1;
    if (ratio < 0.5 && b1 / (1.0 - ratio) < 1e-16 * (acc + 1.0)) {
      acc += b1 / (1.0 - ratio);
      return acc;
    }
  }
  throw std::domain_error("divergent series");
}

double rho_finite_support(const Potential& v, double alpha) {
  // Candidate jumps y with a finite value: y = z - shift for z in the base
  // domain (including the base origin).
  std::set<Site> candidates;
  Site sh = v.is_shifted() ? v.shift : origin(v.dimension);
  auto add_candidate = [&](const Site& z) {
    Site y = sub(z, sh);
    if (!is_zero(y)) candidates.insert(std::move(y));
  };
  add_candidate(origin(v.dimension));
  if (v.kind == Potential::Kind::nearest_neighbor) {
    for (int k = 0; k < v.dimension; ++k) {
      Site e = origin(v.dimension);
      e[static_cast<std::size_t>(k)] = 1;
      add_candidate(e);
      e[static_cast<std::size_t>(k)] = -1;
      add_candidate(e);
    }
  } else {
    for (const auto& kv : v.table) add_candidate(kv.first);
  }
  double acc = 0.0;
  for (const Site& y : candidates) {
    double val = v(y);
    if (!std::isinf(val)) acc += std::exp(-alpha * val);
  }
  return acc;
}

}  // namespace

double rho(const Potential& v, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("rho: alpha must be positive");
  double result;
  switch (v.kind) {
    case Potential::Kind::gaussian: {
      double a = alpha * v.scale;
      double theta = theta_sum_upper(a);
      double lift = v.is_shifted() ? std::exp(a * static_cast<double>(norm2(v.shift))) : 1.0;
      result = lift * int_pow(theta, v.dimension) - 1.0;
      break;
    }
    case Potential::Kind::power_law:
      result = rho_power_law(v, alpha);
      break;
    case Potential::Kind::nearest_neighbor:
    case Potential::Kind::table:
      result = rho_finite_support(v, alpha);
      break;
    default:
      throw std::domain_error("divergent series");
  }
  if (std::isnan(result)) throw std::domain_error("divergent series");
  return result;
}

double rho0() {
  static const double value = [] {
    double lo = 0.0, hi = 0.9;
    auto f = [](double r) { return r / ((1.0 - r) * (1.0 - r)) - r - 1.0; };
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
      mid = 0.5 * (lo + hi);
      double fm = f(mid);
      if (std::fabs(fm) < 1e-12) break;
      if (fm < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return mid;
  }();
  return value;
}

double beta_upper_from_rho(double rho_value) {
  if (!(rho_value >= 0.0) || !(rho_value < 1.0)) throw std::domain_error("rho out of range");
  return rho_value / ((1.0 - rho_value) * (1.0 - rho_value)) - rho_value;
}

const char* bound_method_name(BoundMethod m) {
  switch (m) {
    case BoundMethod::rho_root:
      return "rho_root";
    case BoundMethod::gaussian_explicit:
      return "gaussian_explicit";
    case BoundMethod::beta_truncated:
      return "beta_truncated";
    case BoundMethod::strongly_convex_shift:
      return "strongly_convex_shift";
  }
  return "unknown";
}

AlphaStarBound alpha_star_upper_rho(const Potential& v) {
  const Potential& vv = v;  // the literal series; callers pick tail_equivalent themselves
  const double r0 = rho0();
  double lo = 1.0;
  while (rho(vv, lo) < r0) {
    lo *= 0.5;
    if (lo < 1e-12) return AlphaStarBound{lo, BoundMethod::rho_root};
  }
  double hi = 2.0 * lo;
  while (rho(vv, hi) >= r0) {
    hi *= 2.0;
    if (hi > 1e30) throw std::domain_error("no finite bound");
  }
  // Invariant: rho(hi) < rho0 <= rho(lo).
  for (int i = 0; i < 500 && std::fabs(rho(vv, hi) - r0) >= 1e-9; ++i) {
    double mid = 0.5 * (lo + hi);
    if (rho(vv, mid) < r0)
      hi = mid;
    else
      lo = mid;
  }
  return AlphaStarBound{hi, BoundMethod::rho_root};
}

AlphaStarBound gaussian_alpha_star_explicit(int dimension) {
  if (dimension < 1) throw std::invalid_argument("gaussian_alpha_star_explicit: dimension must be >= 1");
  const double pi = 3.14159265358979323846;
  double u = std::pow(rho0() + 1.0, 1.0 / dimension) - 1.0;
  return AlphaStarBound{pi / (u * u), BoundMethod::gaussian_explicit};
}

AlphaStarBound alpha_star_shift_strongly_convex(const Potential& v, const Site& vshift) {
  if (static_cast<int>(vshift.size()) != v.dimension)
    throw std::invalid_argument("alpha_star_shift_strongly_convex: shift dimension mismatch");
  std::optional<double> m = strong_convexity_modulus(v);
  if (!m) throw std::domain_error("no modulus");
  double base = gaussian_alpha_star_explicit(v.dimension).value;
  return AlphaStarBound{base / *m, BoundMethod::strongly_convex_shift};
}

BetaEstimate beta_truncated(const CycleCatalog& catalog) {
  if (!catalog.anchored) throw std::invalid_argument("beta_truncated: needs an anchored catalog");
  if (std::isinf(catalog.tail_bound)) throw std::domain_error("divergent tail");
  double trunc = 0.0;
  for (const CatalogEntry& e : catalog.entries) {
    double n = static_cast<double>(e.cycle.length());
    trunc += n * n * e.weight;  // n translates through the origin, each with mass n*w
  }
  return BetaEstimate{trunc, catalog.tail_bound, catalog.alpha, catalog.cutoffs};
}

double excluded_mass_bound(const Potential& v, double alpha, int dimension, const Cutoffs& cutoffs) {
  Potential eq = tail_equivalent(v);
  double rho_full = rho(eq, alpha);
  if (!(rho_full < 1.0)) return kInf;

  std::vector<Site> jumps = admissible_jumps(eq, cutoffs.max_jump);
  double rho_restricted = 0.0;
  for (const Site& y : jumps) rho_restricted += std::exp(-alpha * eq(y));
  double rho_excl = std::max(0.0, rho_full - rho_restricted);

  const int L = cutoffs.max_length;
  const double r = rho_full;
  double tail = std::pow(r, L + 1) * ((L + 1) - L * r) / ((1.0 - r) * (1.0 - r));
  for (int n = 2; n <= L; ++n) tail += static_cast<double>(n) * n * rho_excl * std::pow(r, n - 1);
  if (cutoffs.min_weight > 0.0) {
    double count = static_cast<double>(jumps.size());
    for (int n = 2; n <= L; ++n) tail += n * cutoffs.min_weight * std::pow(count, n - 1);
  }
  (void)dimension;
  return tail;
}

MeanMatrixRow mean_matrix_row(const CycleCatalog& catalog, const Cycle& gamma) {
  if (!catalog.anchored) throw std::invalid_argument("mean_matrix_row: needs an anchored catalog");
  MeanMatrixRow row;
  std::vector<Site> gsup = support(gamma);
  for (int i = 0; i < static_cast<int>(catalog.entries.size()); ++i) {
    const CatalogEntry& entry = catalog.entries[static_cast<std::size_t>(i)];
    for (const Site& a : gsup) {
      for (const Site& b : entry.cycle.sites) {
        row.mass[{i, sub(a, b)}] = entry.weight;
      }
    }
  }
  return row;
}

std::vector<double> branching_row_sums(const CycleCatalog& catalog, const Cycle& gamma, int steps) {
  if (steps < 1) throw std::invalid_argument("branching_row_sums: steps must be >= 1");
  // Rows are translation covariant: the row of a class translate is the
  // class row with shifted keys, so one row per class suffices.
  std::vector<MeanMatrixRow> class_rows;
  class_rows.reserve(catalog.entries.size());
  for (const CatalogEntry& e : catalog.entries) class_rows.push_back(mean_matrix_row(catalog, e.cycle));

  std::vector<double> sums;
  std::map<std::pair<int, Site>, double> mass = mean_matrix_row(catalog, gamma).mass;
  while (true) {
    double s = 0.0;
    for (const auto& kv : mass) s += kv.second;
    sums.push_back(s);
    if (static_cast<int>(sums.size()) >= steps) break;
    std::map<std::pair<int, Site>, double> next;
    for (const auto& [key, m] : mass) {
      const auto& [cls, off] = key;
      for (const auto& [rkey, w] : class_rows[static_cast<std::size_t>(cls)].mass) {
        next[{rkey.first, add(rkey.second, off)}] += m * w;
      }
    }
    mass = std::move(next);
  }
  return sums;
}

std::optional<SubcriticalityCertificate> certify_subcritical(const Potential& v, double alpha,
                                                             const CycleCatalog* catalog) {
  std::optional<SubcriticalityCertificate> best;
  Potential eq = tail_equivalent(v);
  double r = rho(eq, alpha);
  if (r < 1.0) {
    double b = beta_upper_from_rho(r);
    if (b < 1.0) best = SubcriticalityCertificate{alpha, b, BoundMethod::rho_root};
  }
  if (catalog && catalog->anchored && std::isfinite(catalog->tail_bound)) {
    BetaEstimate est = beta_truncated(*catalog);
    if (est.upper() < 1.0 && (!best || est.upper() < best->beta_upper))
      best = SubcriticalityCertificate{alpha, est.upper(), BoundMethod::beta_truncated};
  }
  return best;
}

}  // namespace cyclegas
