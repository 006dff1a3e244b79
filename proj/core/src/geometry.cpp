#include "cyclegas/geometry.hpp"

#include <cstdlib>
#include <sstream>

namespace cyclegas {

std::string format_site(const Site& s) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out << ',';
    out << s[i];
  }
  out << ')';
  return out.str();
}

Site parse_site(const std::string& text, int dimension) {
  Site s;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  };
  skip_ws();
  bool parens = i < text.size() && text[i] == '(';
  if (parens) ++i;
  while (true) {
    skip_ws();
    std::size_t start = i;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) throw std::invalid_argument("parse_site: expected integer in '" + text + "'");
    long v = std::strtol(text.c_str() + start, nullptr, 10);
    s.push_back(static_cast<Coord>(v));
    skip_ws();
    if (i < text.size() && text[i] == ',') {
      ++i;
      continue;
    }
    break;
  }
  if (parens) {
    if (i >= text.size() || text[i] != ')') throw std::invalid_argument("parse_site: missing ')' in '" + text + "'");
    ++i;
  }
  skip_ws();
  if (i != text.size()) throw std::invalid_argument("parse_site: trailing characters in '" + text + "'");
  if (dimension > 0 && static_cast<int>(s.size()) != dimension)
    throw std::invalid_argument("parse_site: expected dimension " + std::to_string(dimension) + " in '" + text + "'");
  return s;
}

std::uint64_t BoxRegion::volume() const {
  if (whole_lattice) throw std::invalid_argument("BoxRegion: whole lattice has no finite volume");
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < lower.size(); ++i)
    v *= static_cast<std::uint64_t>(static_cast<std::int64_t>(upper[i]) - lower[i] + 1);
  return v;
}

std::vector<Site> BoxRegion::sites() const {
  if (whole_lattice) throw std::invalid_argument("BoxRegion: cannot enumerate the whole lattice");
  std::vector<Site> out;
  out.reserve(volume());
  Site cur = lower;
  while (true) {
    out.push_back(cur);
    std::size_t k = cur.size();
    while (k > 0) {
      --k;
      if (cur[k] < upper[k]) {
        ++cur[k];
        for (std::size_t j = k + 1; j < cur.size(); ++j) cur[j] = lower[j];
        break;
      }
      if (k == 0) return out;
    }
  }
}

}  // namespace cyclegas
