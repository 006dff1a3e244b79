#include "cyclegas/free_process.hpp"

#include <algorithm>

#include "cyclegas/rng.hpp"

namespace cyclegas {

FreeProcessSlab sample_free_slab(const CycleCatalog& restricted, double t0, double t1,
                                 std::uint64_t seed) {
  if (restricted.anchored)
    throw std::invalid_argument("sample_free_slab: needs a restricted (concrete) catalog");
  if (!(t1 > t0)) throw std::invalid_argument("sample_free_slab: needs t1 > t0");

  FreeProcessSlab slab;
  slab.t0 = t0;
  slab.t1 = t1;
  slab.cycles = restricted;

  for (int i = 0; i < static_cast<int>(restricted.entries.size()); ++i) {
    const CatalogEntry& e = restricted.entries[static_cast<std::size_t>(i)];
    RngStream rng(stream_key(seed, {0x51abu, hash_cycle(e.cycle)}));
    std::uint64_t boundary = rng.poisson(e.weight);
    for (std::uint64_t k = 0; k < boundary; ++k)
      slab.points.push_back(CylinderPoint{i, t0, rng.exponential(), true});
    std::uint64_t interior = rng.poisson(e.weight * (t1 - t0));
    for (std::uint64_t k = 0; k < interior; ++k) {
      double birth = rng.uniform(t0, t1);
      slab.points.push_back(CylinderPoint{i, birth, rng.exponential(), false});
    }
  }
  std::sort(slab.points.begin(), slab.points.end(), [](const CylinderPoint& a, const CylinderPoint& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.cycle_index < b.cycle_index;
  });
  return slab;
}

std::optional<double> find_empty_time(const FreeProcessSlab& slab) {
  // Sweep the alive count; a death at u leaves the process empty at u when
  // nothing else is alive, so deaths sort before births at equal times.
  struct Event {
    double time;
    bool birth;
  };
  std::vector<Event> events;
  events.reserve(2 * slab.points.size());
  for (const CylinderPoint& p : slab.points) {
    events.push_back(Event{p.birth, true});
    if (p.death() <= slab.t1) events.push_back(Event{p.death(), false});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.birth < b.birth;
  });

  double candidate = slab.t0;
  long alive = 0;
  for (const Event& e : events) {
    if (alive == 0 && e.time > candidate) return candidate;
    if (e.birth)
      ++alive;
    else {
      --alive;
      if (alive == 0) candidate = e.time;
    }
  }
  if (alive == 0 && candidate <= slab.t1) return candidate;
  return std::nullopt;
}

}  // namespace cyclegas
