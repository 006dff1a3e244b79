#include "cyclegas/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "cyclegas/bounds.hpp"

namespace cyclegas {

namespace {

std::string hex_double(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double parse_double(const std::string& s) {
  const char* p = s.c_str();
  char* end = nullptr;
  double v = std::strtod(p, &end);
  if (end == p) throw std::invalid_argument("catalog: bad float '" + s + "'");
  return v;
}

}  // namespace

std::vector<Site> admissible_jumps(const Potential& v, double max_jump) {
  if (!(max_jump > 0.0)) throw std::invalid_argument("admissible_jumps: max_jump must be positive");
  const Coord r = static_cast<Coord>(std::floor(max_jump));
  const double r2 = max_jump * max_jump;
  std::vector<Site> out;
  Site cur(static_cast<std::size_t>(v.dimension), -r);
  while (true) {
    if (!is_zero(cur) && static_cast<double>(norm2(cur)) <= r2 && !std::isinf(v(cur))) out.push_back(cur);
    std::size_t k = cur.size();
    bool done = true;
    while (k > 0) {
      --k;
      if (cur[k] < r) {
        ++cur[k];
        for (std::size_t j = k + 1; j < cur.size(); ++j) cur[j] = -r;
        done = false;
        break;
      }
    }
    if (done) break;
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

namespace {

struct Enumerator {
  const Potential& v;
  double alpha;
  Cutoffs cutoffs;
  std::size_t max_classes;
  std::vector<Site> jumps;
  double min_jump_value;  // most negative admissible single-jump value (0 if none negative)
  std::vector<Site> path;
  std::unordered_set<Site> visited;
  std::vector<CatalogEntry> out;

  void run() {
    path.push_back(origin(v.dimension));
    visited.insert(path[0]);
    extend(0.0);
  }

  void extend(double energy) {
    // Copy, not a reference: push_back below may reallocate the path.
    const Site last = path.back();
    if (path.size() >= 2) {
      Site closing = sub(path[0], last);
      double vc = v(closing);
      if (static_cast<double>(norm2(closing)) <= cutoffs.max_jump * cutoffs.max_jump && !std::isinf(vc)) {
        double w = std::exp(-alpha * (energy + vc));
        if (w >= cutoffs.min_weight && w > 0.0) {
          if (out.size() >= max_classes) throw std::length_error("catalog too large");
          out.push_back(CatalogEntry{Cycle{path}, w});
        }
      }
    }
    if (static_cast<int>(path.size()) >= cutoffs.max_length) return;
    for (const Site& y : jumps) {
      Site next = add(last, y);
      // The origin must stay the lex-min of the support.
      if (!lex_less(path[0], next)) continue;
      if (visited.count(next)) continue;
      double e2 = energy + v(y);
      // Cheapest possible completion from here; only bites when min_weight > 0.
      int remaining = cutoffs.max_length - static_cast<int>(path.size()) + 1;
      double floor_energy = e2 + remaining * std::min(0.0, min_jump_value);
      if (cutoffs.min_weight > 0.0 && std::exp(-alpha * floor_energy) < cutoffs.min_weight) continue;
      path.push_back(next);
      visited.insert(next);
      extend(e2);
      visited.erase(next);
      path.pop_back();
    }
  }
};

}  // namespace

CycleCatalog enumerate_cycles(const Potential& v, double alpha, const Cutoffs& cutoffs,
                              std::size_t max_classes) {
  if (!(alpha > 0.0)) throw std::invalid_argument("enumerate_cycles: alpha must be positive");
  if (cutoffs.max_length < 2) throw std::invalid_argument("enumerate_cycles: max_length must be >= 2");
  Enumerator e{v, alpha, cutoffs, max_classes};
  e.jumps = admissible_jumps(v, cutoffs.max_jump);
  e.min_jump_value = 0.0;
  for (const Site& y : e.jumps) e.min_jump_value = std::min(e.min_jump_value, v(y));
  e.run();
  std::sort(e.out.begin(), e.out.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
    if (a.cycle.length() != b.cycle.length()) return a.cycle.length() < b.cycle.length();
    return a.cycle < b.cycle;
  });

  CycleCatalog cat;
  cat.dimension = v.dimension;
  cat.cutoffs = cutoffs;
  cat.potential_id = potential_id(v);
  cat.alpha = alpha;
  cat.tail_bound = excluded_mass_bound(v, alpha, v.dimension, cutoffs);
  cat.anchored = true;
  cat.entries = std::move(e.out);
  return cat;
}

std::vector<CatalogEntry> through_origin(const CycleCatalog& catalog) {
  if (!catalog.anchored) throw std::invalid_argument("through_origin: needs an anchored catalog");
  std::vector<CatalogEntry> out;
  for (const CatalogEntry& entry : catalog.entries) {
    for (const Site& s : support(entry.cycle)) {
      Site back(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) back[i] = -s[i];
      out.push_back(CatalogEntry{translate(entry.cycle, back), entry.weight});
    }
  }
  return out;
}

CycleCatalog catalog_restrict(const CycleCatalog& catalog, const BoxRegion& region,
                              std::size_t max_cycles) {
  if (region.whole_lattice) return catalog;
  if (region.dimension() != catalog.dimension)
    throw std::invalid_argument("catalog_restrict: region dimension mismatch");

  CycleCatalog out;
  out.dimension = catalog.dimension;
  out.cutoffs = catalog.cutoffs;
  out.potential_id = catalog.potential_id;
  out.alpha = catalog.alpha;
  out.tail_bound = catalog.tail_bound;
  out.anchored = false;

  if (!catalog.anchored) {
    for (const CatalogEntry& entry : catalog.entries) {
      bool inside = true;
      for (const Site& s : entry.cycle.sites)
        if (!region.contains(s)) {
          inside = false;
          break;
        }
      if (inside) out.entries.push_back(entry);
    }
    return out;
  }

  const std::size_t d = static_cast<std::size_t>(catalog.dimension);
  for (const CatalogEntry& entry : catalog.entries) {
    Site mn = entry.cycle.sites[0], mx = entry.cycle.sites[0];
    for (const Site& s : entry.cycle.sites)
      for (std::size_t k = 0; k < d; ++k) {
        mn[k] = std::min(mn[k], s[k]);
        mx[k] = std::max(mx[k], s[k]);
      }
    Site lo(d), hi(d);
    bool fits = true;
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = region.lower[k] - mn[k];
      hi[k] = region.upper[k] - mx[k];
      if (lo[k] > hi[k]) {
        fits = false;
        break;
      }
    }
    if (!fits) continue;
    Site off = lo;
    while (true) {
      if (out.entries.size() >= max_cycles) throw std::length_error("catalog too large");
      out.entries.push_back(CatalogEntry{translate(entry.cycle, off), entry.weight});
      std::size_t k = d;
      bool done = true;
      while (k > 0) {
        --k;
        if (off[k] < hi[k]) {
          ++off[k];
          for (std::size_t j = k + 1; j < d; ++j) off[j] = lo[j];
          done = false;
          break;
        }
      }
      if (done) break;
    }
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
    if (a.cycle.length() != b.cycle.length()) return a.cycle.length() < b.cycle.length();
    return a.cycle < b.cycle;
  });
  return out;
}

void write_catalog(std::ostream& out, const CycleCatalog& catalog) {
  out << "cyclegas-catalog 1\n";
  out << "dimension " << catalog.dimension << "\n";
  out << "anchored " << (catalog.anchored ? 1 : 0) << "\n";
  out << "max_length " << catalog.cutoffs.max_length << "\n";
  out << "max_jump " << hex_double(catalog.cutoffs.max_jump) << "\n";
  out << "min_weight " << hex_double(catalog.cutoffs.min_weight) << "\n";
  out << "alpha " << hex_double(catalog.alpha) << "\n";
  out << "tail_bound " << hex_double(catalog.tail_bound) << "\n";
  out << "potential " << catalog.potential_id << "\n";
  out << "entries " << catalog.entries.size() << "\n";
  for (const CatalogEntry& e : catalog.entries)
    out << format_cycle(e.cycle) << ' ' << hex_double(e.weight) << "\n";
}

void write_catalog_file(const std::string& path, const CycleCatalog& catalog) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_catalog_file: cannot open " + path);
  write_catalog(out, catalog);
}

CycleCatalog read_catalog(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw std::invalid_argument("catalog: truncated header");
    return line;
  };
  if (next_line() != "cyclegas-catalog 1") throw std::invalid_argument("catalog: bad magic line");

  CycleCatalog cat;
  std::size_t count = 0;
  bool have_count = false;
  while (!have_count) {
    std::string& l = next_line();
    std::size_t sp = l.find(' ');
    if (sp == std::string::npos) throw std::invalid_argument("catalog: bad header line '" + l + "'");
    std::string key = l.substr(0, sp);
    std::string val = l.substr(sp + 1);
    if (key == "dimension")
      cat.dimension = std::stoi(val);
    else if (key == "anchored")
      cat.anchored = std::stoi(val) != 0;
    else if (key == "max_length")
      cat.cutoffs.max_length = std::stoi(val);
    else if (key == "max_jump")
      cat.cutoffs.max_jump = parse_double(val);
    else if (key == "min_weight")
      cat.cutoffs.min_weight = parse_double(val);
    else if (key == "alpha")
      cat.alpha = parse_double(val);
    else if (key == "tail_bound")
      cat.tail_bound = parse_double(val);
    else if (key == "potential")
      cat.potential_id = val;
    else if (key == "entries") {
      count = static_cast<std::size_t>(std::stoull(val));
      have_count = true;
    } else
      throw std::invalid_argument("catalog: unknown header key '" + key + "'");
  }
  if (cat.dimension < 1) throw std::invalid_argument("catalog: missing dimension");
  cat.entries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string& l = next_line();
    std::size_t sp = l.rfind(' ');
    if (sp == std::string::npos) throw std::invalid_argument("catalog: bad entry line '" + l + "'");
    Cycle c = parse_cycle(l.substr(0, sp), cat.dimension);
    double w = parse_double(l.substr(sp + 1));
    cat.entries.push_back(CatalogEntry{std::move(c), w});
  }
  return cat;
}

CycleCatalog read_catalog_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_catalog_file: cannot open " + path);
  return read_catalog(in);
}

}  // namespace cyclegas
