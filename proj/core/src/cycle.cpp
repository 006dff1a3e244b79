#include "cyclegas/cycle.hpp"

#include <algorithm>
#include <unordered_set>

namespace cyclegas {

bool Cycle::operator<(const Cycle& o) const {
  const std::size_t n = std::min(sites.size(), o.sites.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (sites[i] != o.sites[i]) return lex_less(sites[i], o.sites[i]);
  }
  return sites.size() < o.sites.size();
}

Cycle canonicalize(std::vector<Site> sites) {
  if (sites.size() < 2) throw std::invalid_argument("canonicalize: too short (need at least 2 sites)");
  const std::size_t dim = sites[0].size();
  std::unordered_set<Site> seen;
  std::size_t min_at = 0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i].size() != dim) throw std::invalid_argument("canonicalize: mixed dimensions");
    if (!seen.insert(sites[i]).second) throw std::invalid_argument("canonicalize: duplicate site");
    if (lex_less(sites[i], sites[min_at])) min_at = i;
  }
  std::rotate(sites.begin(), sites.begin() + static_cast<std::ptrdiff_t>(min_at), sites.end());
  return Cycle{std::move(sites)};
}

Cycle reverse_cycle(const Cycle& c) {
  std::vector<Site> rev(c.sites.rbegin(), c.sites.rend());
  return canonicalize(std::move(rev));
}

Cycle translate(const Cycle& c, const Site& v) {
  Cycle out = c;
  for (Site& s : out.sites) s = add(s, v);
  return out;  // translation preserves the canonical rotation
}

std::vector<Site> support(const Cycle& c) {
  std::vector<Site> s = c.sites;
  std::sort(s.begin(), s.end(), lex_less);
  return s;
}

bool compatible(const Cycle& a, const Cycle& b) {
  if (&a == &b) return false;
  std::vector<Site> sa = support(a);
  std::vector<Site> sb = support(b);
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    if (sa[i] == sb[j]) return false;
    if (lex_less(sa[i], sb[j]))
      ++i;
    else
      ++j;
  }
  return true;
}

Site apply_cycle(const Cycle& c, const Site& x) {
  for (std::size_t i = 0; i < c.sites.size(); ++i) {
    if (c.sites[i] == x) return c.sites[(i + 1) % c.sites.size()];
  }
  return x;
}

std::string format_cycle(const Cycle& c) {
  std::string out;
  for (std::size_t i = 0; i < c.sites.size(); ++i) {
    if (i) out += ',';
    out += format_site(c.sites[i]);
  }
  return out;
}

Cycle parse_cycle(const std::string& text, int dimension) {
  std::vector<Site> sites;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == ',')) ++i;
    if (i >= text.size()) break;
    if (text[i] != '(') throw std::invalid_argument("parse_cycle: expected '(' in '" + text + "'");
    std::size_t close = text.find(')', i);
    if (close == std::string::npos) throw std::invalid_argument("parse_cycle: missing ')' in '" + text + "'");
    sites.push_back(parse_site(text.substr(i, close - i + 1), dimension));
    i = close + 1;
  }
  return canonicalize(std::move(sites));
}

Permutation Permutation::from_cycles(std::vector<Cycle> cs) {
  std::unordered_set<Site> seen;
  for (const Cycle& c : cs) {
    for (const Site& s : c.sites) {
      if (!seen.insert(s).second) throw std::invalid_argument("Permutation: overlapping cycle supports");
    }
  }
  std::sort(cs.begin(), cs.end());
  return Permutation{std::move(cs)};
}

Site Permutation::apply(const Site& x) const {
  for (const Cycle& c : cycles) {
    Site y = apply_cycle(c, x);
    if (y != x) return y;
  }
  return x;
}

std::vector<Site> Permutation::support() const {
  std::vector<Site> out;
  for (const Cycle& c : cycles) out.insert(out.end(), c.sites.begin(), c.sites.end());
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

}  // namespace cyclegas
