#include "cyclegas/clan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "cyclegas/rng.hpp"

namespace cyclegas {

namespace {

Site negate(const Site& s) {
  Site out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = -s[i];
  return out;
}

void check_anchored(const CycleCatalog& anchored) {
  if (!anchored.anchored) throw std::invalid_argument("field needs an anchored catalog");
  for (const CatalogEntry& e : anchored.entries)
    if (!is_zero(e.cycle.sites.front()))
      throw std::invalid_argument("anchored catalog entry does not start at the origin");
}

}  // namespace

CylinderField::CylinderField(const CycleCatalog& anchored, std::uint64_t seed)
    : classes_(anchored), lazy_(true), seed_(seed) {
  check_anchored(anchored);
}

CylinderField::CylinderField(const CycleCatalog& anchored, const FreeProcessSlab& slab)
    : classes_(anchored), lazy_(false) {
  check_anchored(anchored);
  std::map<Cycle, int> class_of;
  for (int i = 0; i < static_cast<int>(anchored.entries.size()); ++i)
    class_of.emplace(anchored.entries[static_cast<std::size_t>(i)].cycle, i);
  for (std::size_t i = 0; i < slab.points.size(); ++i) {
    const CylinderPoint& p = slab.points[i];
    if (p.boundary) throw std::invalid_argument("slab field needs an empty start");
    const Cycle& concrete = slab.cycles.entries[static_cast<std::size_t>(p.cycle_index)].cycle;
    Site offset = concrete.sites.front();
    auto it = class_of.find(translate(concrete, negate(offset)));
    if (it == class_of.end()) throw std::invalid_argument("slab cycle missing from the class catalog");
    TypeKey type{it->second, std::move(offset)};
    slab_points_[type].push_back(
        FieldCylinder{type, 0, static_cast<int>(i), p.birth, p.death()});
  }
}

Cycle CylinderField::concrete_cycle(const TypeKey& type) const {
  return translate(classes_.entries[static_cast<std::size_t>(type.class_index)].cycle, type.offset);
}

double CylinderField::type_weight(const TypeKey& type) const {
  return classes_.entries[static_cast<std::size_t>(type.class_index)].weight;
}

const std::vector<FieldCylinder>& CylinderField::batch(int class_index, const Site& offset,
                                                       int pane) const {
  auto key = std::make_tuple(class_index, offset, pane);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  double w = classes_.entries[static_cast<std::size_t>(class_index)].weight;
  RngStream rng(stream_key(seed_, {0xc1a5u, static_cast<std::uint64_t>(class_index),
                                   hash_site(offset), static_cast<std::uint64_t>(pane + 1)}));
  std::vector<FieldCylinder> cyls;
  std::uint64_t n = rng.poisson(w);
  TypeKey type{class_index, offset};
  for (std::uint64_t i = 0; i < n; ++i) {
    double birth, death;
    if (pane < 0) {
      birth = -rng.exponential(1.0);
      death = std::numeric_limits<double>::infinity();
    } else {
      death = -static_cast<double>(pane + 1) + rng.u01();
      birth = death - rng.exponential(1.0);
    }
    cyls.push_back(FieldCylinder{type, pane, static_cast<int>(i), birth, death});
  }
  return cache_.emplace(std::move(key), std::move(cyls)).first->second;
}

void CylinderField::append_alive_at(const TypeKey& type, double t,
                                    std::vector<FieldCylinder>& out) const {
  if (!lazy_) {
    auto it = slab_points_.find(type);
    if (it == slab_points_.end()) return;
    for (const FieldCylinder& c : it->second)
      if (c.birth <= t && t < c.death) out.push_back(c);
    return;
  }
  if (t > 0.0) throw std::invalid_argument("lazy field queried after time zero");
  for (const FieldCylinder& c : batch(type.class_index, type.offset, -1))
    if (c.birth <= t) out.push_back(c);
  const int last_pane = static_cast<int>(std::floor(-t));
  for (int k = 0; k <= last_pane; ++k)
    for (const FieldCylinder& c : batch(type.class_index, type.offset, k))
      if (c.birth <= t && t < c.death) out.push_back(c);
}

std::vector<TypeKey> types_meeting(const CycleCatalog& anchored, const BoxRegion& window) {
  check_anchored(anchored);
  if (window.whole_lattice) throw std::invalid_argument("types_meeting: window must be a finite box");
  std::vector<TypeKey> out;
  std::vector<Site> window_sites = window.sites();
  for (int j = 0; j < static_cast<int>(anchored.entries.size()); ++j) {
    std::set<Site> offsets;
    for (const Site& x : window_sites)
      for (const Site& u : anchored.entries[static_cast<std::size_t>(j)].cycle.sites)
        offsets.insert(sub(x, u));
    for (const Site& o : offsets) out.push_back(TypeKey{j, o});
  }
  return out;
}

Clan build_clan(const CylinderField& field, const BoxRegion& window, std::size_t max_nodes) {
  Clan clan;
  std::map<std::tuple<int, Site, int, int>, int> node_of;

  auto intern = [&](const FieldCylinder& c) {
    auto key = std::make_tuple(c.type.class_index, c.type.offset, c.pane, c.index);
    auto it = node_of.find(key);
    if (it != node_of.end()) return std::make_pair(it->second, false);
    int id = static_cast<int>(clan.nodes.size());
    clan.nodes.push_back(ClanNode{c, field.concrete_cycle(c.type), {}});
    if (clan.nodes.size() > max_nodes) throw std::length_error("clan node cap exceeded");
    node_of.emplace(std::move(key), id);
    return std::make_pair(id, true);
  };

  std::vector<FieldCylinder> buf;
  for (const TypeKey& t : types_meeting(field.classes(), window)) {
    buf.clear();
    field.append_alive_at(t, 0.0, buf);
    for (const FieldCylinder& c : buf) clan.roots.push_back(intern(c).first);
  }

  const CycleCatalog& classes = field.classes();
  for (std::size_t head = 0; head < clan.nodes.size(); ++head) {
    const double born = clan.nodes[head].cyl.birth;
    const Cycle cyc = clan.nodes[head].cycle;  // copy, the node vector reallocates
    for (int j = 0; j < static_cast<int>(classes.entries.size()); ++j) {
      std::set<Site> offsets;
      for (const Site& s : cyc.sites)
        for (const Site& u : classes.entries[static_cast<std::size_t>(j)].cycle.sites)
          offsets.insert(sub(s, u));
      for (const Site& o : offsets) {
        buf.clear();
        field.append_alive_at(TypeKey{j, o}, born, buf);
        for (const FieldCylinder& c : buf) {
          // Strictly older only; this also drops the node itself. All the
          // queried types overlap the node's support by construction.
          if (!(c.birth < born)) continue;
          // Intern first: it can grow the node vector and invalidate
          // references into it.
          int parent = intern(c).first;
          clan.nodes[head].parents.push_back(parent);
        }
      }
    }
  }
  return clan;
}

std::vector<int> clan_generations(const Clan& clan) {
  std::vector<int> gen(clan.nodes.size(), -1);
  std::vector<int> queue;
  for (int r : clan.roots)
    if (gen[static_cast<std::size_t>(r)] == -1) {
      gen[static_cast<std::size_t>(r)] = 0;
      queue.push_back(r);
    }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int n = queue[head];
    for (int p : clan.nodes[static_cast<std::size_t>(n)].parents)
      if (gen[static_cast<std::size_t>(p)] == -1) {
        gen[static_cast<std::size_t>(p)] = gen[static_cast<std::size_t>(n)] + 1;
        queue.push_back(p);
      }
  }
  return gen;
}

namespace {

std::vector<int> birth_order(const Clan& clan) {
  std::vector<int> order(clan.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ba = clan.nodes[static_cast<std::size_t>(a)].cyl.birth;
    double bb = clan.nodes[static_cast<std::size_t>(b)].cyl.birth;
    if (ba != bb) return ba < bb;
    return a < b;
  });
  return order;
}

}  // namespace

std::vector<char> classify(const Clan& clan) {
  std::vector<char> kept(clan.nodes.size(), 0);
  for (int id : birth_order(clan)) {
    char k = 1;
    for (int p : clan.nodes[static_cast<std::size_t>(id)].parents)
      if (kept[static_cast<std::size_t>(p)]) {
        k = 0;
        break;
      }
    kept[static_cast<std::size_t>(id)] = k;
  }
  return kept;
}

std::vector<char> classify_restricted(const Clan& clan, const BoxRegion& region) {
  std::vector<char> inside(clan.nodes.size(), 1);
  for (std::size_t i = 0; i < clan.nodes.size(); ++i)
    for (const Site& s : clan.nodes[i].cycle.sites)
      if (!region.contains(s)) {
        inside[i] = 0;
        break;
      }
  std::vector<char> kept(clan.nodes.size(), 0);
  for (int id : birth_order(clan)) {
    if (!inside[static_cast<std::size_t>(id)]) continue;  // erased, stays deleted
    char k = 1;
    for (int p : clan.nodes[static_cast<std::size_t>(id)].parents)
      if (kept[static_cast<std::size_t>(p)]) {
        k = 0;
        break;
      }
    kept[static_cast<std::size_t>(id)] = k;
  }
  return kept;
}

std::vector<Cycle> kept_root_cycles(const Clan& clan, const std::vector<char>& kept) {
  std::vector<Cycle> out;
  for (int r : clan.roots)
    if (kept[static_cast<std::size_t>(r)]) out.push_back(clan.nodes[static_cast<std::size_t>(r)].cycle);
  return out;
}

}  // namespace cyclegas
