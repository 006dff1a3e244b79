#ifndef CYCLEGAS_GEOMETRY_HPP
#define CYCLEGAS_GEOMETRY_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cyclegas {

using Coord = std::int32_t;

// A lattice site is an integer vector; the dimension is fixed per run.
using Site = std::vector<Coord>;

inline Site origin(int dimension) { return Site(static_cast<std::size_t>(dimension), 0); }

inline Site add(const Site& a, const Site& b) {
  Site r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Site sub(const Site& a, const Site& b) {
  Site r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline bool is_zero(const Site& a) {
  for (Coord c : a)
    if (c != 0) return false;
  return true;
}

// Squared Euclidean norm; exact in 64-bit for any representable site.
inline std::int64_t norm2(const Site& a) {
  std::int64_t s = 0;
  for (Coord c : a) s += static_cast<std::int64_t>(c) * c;
  return s;
}

inline std::int64_t linf(const Site& a) {
  std::int64_t m = 0;
  for (Coord c : a) {
    std::int64_t v = c < 0 ? -static_cast<std::int64_t>(c) : c;
    if (v > m) m = v;
  }
  return m;
}

// Lexicographic order, first coordinate most significant.
inline bool lex_less(const Site& a, const Site& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

std::string format_site(const Site& s);
Site parse_site(const std::string& text, int dimension);

// Axis-aligned box of sites, or the whole lattice.
struct BoxRegion {
  bool whole_lattice = false;
  Site lower;  // inclusive
  Site upper;  // inclusive

  static BoxRegion all_of_zd(int dimension) {
    BoxRegion r;
    r.whole_lattice = true;
    r.lower = origin(dimension);
    r.upper = origin(dimension);
    return r;
  }
  static BoxRegion box(Site lo, Site hi) {
    if (lo.size() != hi.size()) throw std::invalid_argument("BoxRegion: corner dimensions differ");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (lo[i] > hi[i]) throw std::invalid_argument("BoxRegion: empty box");
    BoxRegion r;
    r.lower = std::move(lo);
    r.upper = std::move(hi);
    return r;
  }

  int dimension() const { return static_cast<int>(lower.size()); }

  bool contains(const Site& s) const {
    if (whole_lattice) return true;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] < lower[i] || s[i] > upper[i]) return false;
    return true;
  }

  std::uint64_t volume() const;          // site count; throws for the whole lattice
  std::vector<Site> sites() const;       // row-major enumeration; throws for the whole lattice
};

}  // namespace cyclegas

// Hash support so sites can key unordered containers.
namespace std {
template <>
struct hash<cyclegas::Site> {
  std::size_t operator()(const cyclegas::Site& s) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ (s.size() * 0xbf58476d1ce4e5b9ull);
    for (cyclegas::Coord c : s) {
      std::uint64_t z = h + 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(static_cast<std::uint32_t>(c));
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      h = z ^ (z >> 31);
    }
    return static_cast<std::size_t>(h);
  }
};
}  // namespace std

#endif
