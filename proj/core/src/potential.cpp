#include "cyclegas/potential.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cyclegas {

namespace {

double int_pow(double base, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

std::uint64_t fnv64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

double Potential::base_value(const Site& x) const {
  switch (kind) {
    case Kind::gaussian:
      return scale * static_cast<double>(norm2(x));
    case Kind::power_law:
      return int_pow(std::sqrt(static_cast<double>(norm2(x))), exponent);
    case Kind::nearest_neighbor: {
      std::int64_t n2 = norm2(x);
      if (n2 == 0) return 0.0;
      return n2 == 1 ? 1.0 : kInfiniteEnergy;
    }
    case Kind::table: {
      if (is_zero(x)) return 0.0;
      auto it = table.find(x);
      return it == table.end() ? kInfiniteEnergy : it->second;
    }
  }
  return kInfiniteEnergy;
}

double Potential::operator()(const Site& x) const {
  if (!is_shifted()) return base_value(x);
  return base_value(add(x, shift)) - base_value(shift);
}

Potential gaussian_potential(int dimension, double scale) {
  if (dimension < 1) throw std::invalid_argument("gaussian_potential: dimension must be >= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("gaussian_potential: scale must be positive");
  Potential v;
  v.kind = Potential::Kind::gaussian;
  v.dimension = dimension;
  v.scale = scale;
  return v;
}

Potential power_law_potential(int dimension, int exponent) {
  if (dimension < 1) throw std::invalid_argument("power_law_potential: dimension must be >= 1");
  if (exponent <= 1 || exponent % 2 != 0)
    throw std::invalid_argument("power_law_potential: exponent must be an even integer > 1");
  Potential v;
  v.kind = Potential::Kind::power_law;
  v.dimension = dimension;
  v.exponent = exponent;
  return v;
}

Potential nearest_neighbor_potential(int dimension) {
  if (dimension < 1) throw std::invalid_argument("nearest_neighbor_potential: dimension must be >= 1");
  Potential v;
  v.kind = Potential::Kind::nearest_neighbor;
  v.dimension = dimension;
  return v;
}

Potential table_potential(int dimension, std::map<Site, double> values) {
  if (dimension < 1) throw std::invalid_argument("table_potential: dimension must be >= 1");
  const Site zero = origin(dimension);
  for (const auto& [x, val] : values) {
    if (static_cast<int>(x.size()) != dimension)
      throw std::invalid_argument("table_potential: entry dimension mismatch");
    if (!(val >= 0.0) || std::isinf(val))
      throw std::invalid_argument("table_potential: values must be finite and nonnegative");
    if (is_zero(x) && val != 0.0) throw std::invalid_argument("table_potential: V(0) must be 0");
    if (!is_zero(x) && !(val > 0.0))
      throw std::invalid_argument("table_potential: V must be strictly positive away from 0");
  }
  values[zero] = 0.0;

  // Strict midpoint convexity on every collinear integer triple: for a pair
  // of support points with an integer midpoint, the midpoint must be in the
  // support and satisfy 2 V(m) < V(a) + V(b); a missing midpoint would mean
  // V(m) = +inf between finite values.
  std::vector<const Site*> pts;
  for (const auto& kv : values) pts.push_back(&kv.first);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Site& a = *pts[i];
      const Site& b = *pts[j];
      Site m(a.size());
      bool integral = true;
      for (std::size_t k = 0; k < a.size(); ++k) {
        Coord s = a[k] + b[k];
        if (s % 2 != 0) {
          integral = false;
          break;
        }
        m[k] = s / 2;
      }
      if (!integral) continue;
      auto it = values.find(m);
      if (it == values.end())
        throw std::invalid_argument("table_potential: midpoint " + format_site(m) +
                                    " of finite-valued pair missing from support");
      double lhs = 2.0 * it->second;
      double rhs = values.at(a) + values.at(b);
      if (!(lhs < rhs))
        throw std::invalid_argument("table_potential: midpoint convexity fails at " + format_site(m));
    }
  }

  Potential v;
  v.kind = Potential::Kind::table;
  v.dimension = dimension;
  v.table = std::move(values);
  return v;
}

Potential load_table_potential(const std::string& path, int dimension) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_table_potential: cannot open " + path);
  std::map<Site, double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    Site x(static_cast<std::size_t>(dimension));
    long long c0;
    if (!(row >> c0)) continue;  // blank line
    x[0] = static_cast<Coord>(c0);
    for (int k = 1; k < dimension; ++k) {
      long long c;
      if (!(row >> c))
        throw std::invalid_argument("load_table_potential: short row at line " + std::to_string(lineno));
      x[static_cast<std::size_t>(k)] = static_cast<Coord>(c);
    }
    double val;
    if (!(row >> val))
      throw std::invalid_argument("load_table_potential: missing value at line " + std::to_string(lineno));
    values[x] = val;
  }
  return table_potential(dimension, std::move(values));
}

Potential shifted(const Potential& v, const Site& v_shift) {
  if (static_cast<int>(v_shift.size()) != v.dimension)
    throw std::invalid_argument("shifted: shift dimension mismatch");
  Potential out = v;
  out.shift = out.shift.empty() ? v_shift : add(out.shift, v_shift);
  if (std::isinf(out.base_value(out.shift)))
    throw std::invalid_argument("shifted: potential is infinite at the shift vector");
  return out;
}

std::string potential_id(const Potential& v) {
  std::ostringstream id;
  switch (v.kind) {
    case Potential::Kind::gaussian:
      id << "gaussian";
      if (v.scale != 1.0) {
        char buf[40];
        std::snprintf(buf, sizeof buf, ":scale=%.17g", v.scale);
        id << buf;
      }
      break;
    case Potential::Kind::power_law:
      id << "powerlaw:p=" << v.exponent;
      break;
    case Potential::Kind::nearest_neighbor:
      id << "nearest_neighbor";
      break;
    case Potential::Kind::table: {
      std::ostringstream body;
      for (const auto& [x, val] : v.table) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "=%.17g;", val);
        body << format_site(x) << buf;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "table:n=%zu:h=%016llx", v.table.size(),
                    static_cast<unsigned long long>(fnv64(body.str())));
      id << buf;
      break;
    }
  }
  id << ":d=" << v.dimension;
  if (v.is_shifted()) id << ":v=" << format_site(v.shift);
  return id.str();
}

double cycle_energy(const Potential& v, const Cycle& c) {
  double e = 0.0;
  const std::size_t n = c.sites.size();
  for (std::size_t i = 0; i < n; ++i) {
    e += v(sub(c.sites[(i + 1) % n], c.sites[i]));
  }
  return e;
}

double weight(const Potential& v, double alpha, const Cycle& c) {
  if (!(alpha > 0.0)) throw std::invalid_argument("weight: alpha must be positive");
  double e = cycle_energy(v, c);
  if (std::isinf(e)) return 0.0;
  return std::exp(-alpha * e);
}

double weight_v(const Potential& v, double alpha, const Cycle& c, const Site& vshift) {
  return weight(shifted(v, vshift), alpha, c);
}

std::optional<double> strong_convexity_modulus(const Potential& v) {
  if (v.kind == Potential::Kind::gaussian) return v.scale;
  return std::nullopt;
}

}  // namespace cyclegas
