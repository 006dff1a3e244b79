#include "cyclegas/loss_network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "cyclegas/rng.hpp"

namespace cyclegas {

std::vector<int> LossNetworkRun::alive_accepted_at(const FreeProcessSlab& slab, double t) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(slab.points.size()); ++i) {
    if (accepted[static_cast<std::size_t>(i)] && slab.points[static_cast<std::size_t>(i)].alive_at(t))
      out.push_back(i);
  }
  return out;
}

LossNetworkRun forward_loss_network(const FreeProcessSlab& slab, double start) {
  for (const CylinderPoint& p : slab.points) {
    if (p.birth < start && p.death() > start)
      throw std::invalid_argument("not empty at start");
  }

  struct Event {
    double time;
    bool birth;
    int point;
  };
  std::vector<Event> events;
  events.reserve(2 * slab.points.size());
  for (int i = 0; i < static_cast<int>(slab.points.size()); ++i) {
    const CylinderPoint& p = slab.points[static_cast<std::size_t>(i)];
    if (p.birth < start) continue;  // fully before the empty start
    events.push_back(Event{p.birth, true, i});
    if (std::isfinite(p.death())) events.push_back(Event{p.death(), false, i});
  }
  std::sort(events.begin(), events.end(), [&](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.birth != b.birth) return !a.birth;  // deaths free sites first
    const auto& pa = slab.points[static_cast<std::size_t>(a.point)];
    const auto& pb = slab.points[static_cast<std::size_t>(b.point)];
    if (pa.cycle_index != pb.cycle_index) return pa.cycle_index < pb.cycle_index;
    return a.point < b.point;
  });

  LossNetworkRun run;
  run.start = start;
  run.accepted.assign(slab.points.size(), 0);

  std::unordered_set<Site> occupied;
  for (const Event& e : events) {
    const CylinderPoint& p = slab.points[static_cast<std::size_t>(e.point)];
    const Cycle& cycle = slab.cycles.entries[static_cast<std::size_t>(p.cycle_index)].cycle;
    if (e.birth) {
      bool free = true;
      for (const Site& s : cycle.sites)
        if (occupied.count(s)) {
          free = false;
          break;
        }
      if (free) {
        run.accepted[static_cast<std::size_t>(e.point)] = 1;
        for (const Site& s : cycle.sites) occupied.insert(s);
      }
    } else if (run.accepted[static_cast<std::size_t>(e.point)]) {
      for (const Site& s : cycle.sites) occupied.erase(s);
    }
  }
  return run;
}

FreeProcessSlab reversed_stationary_slab(const CycleCatalog& restricted, std::uint64_t seed,
                                         double t_min, double horizon) {
  if (restricted.anchored)
    throw std::invalid_argument("reversed_stationary_slab: needs a restricted (concrete) catalog");
  if (t_min < 0.0 || t_min > horizon) throw std::invalid_argument("reversed_stationary_slab: bad t_min");

  const std::size_t n = restricted.entries.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + restricted.entries[i].weight;
  const double total_rate = prefix[n];

  RngStream rng(stream_key(seed, {0xe8acu}));

  struct Open {
    int cycle_index;
    double real_death;  // +inf: still alive at time 0
  };
  std::vector<Open> open;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t k = rng.poisson(restricted.entries[i].weight);
    for (std::uint64_t j = 0; j < k; ++j)
      open.push_back(Open{static_cast<int>(i), std::numeric_limits<double>::infinity()});
  }

  std::vector<CylinderPoint> points;
  double tau = 0.0;
  while (!open.empty() || tau < t_min) {
    double rate = total_rate + static_cast<double>(open.size());
    tau += rng.exponential(rate);
    if (tau > horizon) throw std::length_error("backward horizon cap exceeded");
    if (open.empty() || rng.u01() * rate < total_rate) {
      // Walking backward, a death line is crossed: a cylinder that dies at
      // -tau exists further in the past; its birth is still unknown.
      double u = rng.u01() * total_rate;
      std::size_t cyc = std::upper_bound(prefix.begin() + 1, prefix.end(), u) - (prefix.begin() + 1);
      if (cyc >= n) cyc = n - 1;
      open.push_back(Open{static_cast<int>(cyc), -tau});
    } else {
      // A birth line: one open cylinder's interval starts here.
      std::size_t k = static_cast<std::size_t>(rng.uniform_index(open.size()));
      points.push_back(CylinderPoint{open[k].cycle_index, -tau, open[k].real_death - (-tau), false});
      open[k] = open.back();
      open.pop_back();
    }
  }

  FreeProcessSlab slab;
  slab.t0 = -tau;
  slab.t1 = 0.0;
  slab.cycles = restricted;
  slab.points = std::move(points);
  std::sort(slab.points.begin(), slab.points.end(), [](const CylinderPoint& a, const CylinderPoint& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.cycle_index < b.cycle_index;
  });
  return slab;
}

ExactSample sample_g_lambda_exact(const CycleCatalog& restricted, std::uint64_t seed, double horizon) {
  FreeProcessSlab slab = reversed_stationary_slab(restricted, seed, 0.0, horizon);
  LossNetworkRun run = forward_loss_network(slab, slab.t0);

  std::vector<Cycle> kept;
  for (int i : run.alive_accepted_at(slab, 0.0))
    kept.push_back(slab.cycles.entries[static_cast<std::size_t>(slab.points[static_cast<std::size_t>(i)].cycle_index)].cycle);
  return ExactSample{Permutation::from_cycles(std::move(kept)), slab.t0, slab.points.size()};
}

namespace {

struct StateEnumerator {
  const CycleCatalog& cat;
  std::size_t max_states;
  std::vector<std::vector<char>> compat;
  std::vector<std::vector<int>> states;
  std::vector<double> weights;
  std::vector<int> current;
  double current_weight = 1.0;

  void run() {
    const int n = static_cast<int>(cat.entries.size());
    compat.assign(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        bool ok = compatible(cat.entries[static_cast<std::size_t>(i)].cycle,
                             cat.entries[static_cast<std::size_t>(j)].cycle);
        compat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = ok;
        compat[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = ok;
      }
    extend(0);
  }

  void extend(int from) {
    if (states.size() >= max_states) throw std::length_error("state space too large");
    states.push_back(current);
    weights.push_back(current_weight);
    const int n = static_cast<int>(cat.entries.size());
    for (int i = from; i < n; ++i) {
      bool ok = true;
      for (int j : current)
        if (!compat[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      current.push_back(i);
      current_weight *= cat.entries[static_cast<std::size_t>(i)].weight;
      extend(i + 1);
      current_weight /= cat.entries[static_cast<std::size_t>(i)].weight;
      current.pop_back();
    }
  }
};

}  // namespace

GibbsTable enumerate_g_lambda(const CycleCatalog& restricted, std::size_t max_states) {
  if (restricted.anchored)
    throw std::invalid_argument("enumerate_g_lambda: needs a restricted (concrete) catalog");
  StateEnumerator e{restricted, max_states};
  e.run();

  GibbsTable table;
  table.cycles = restricted;
  table.states = std::move(e.states);
  table.probability = std::move(e.weights);
  double z = 0.0;
  for (double w : table.probability) z += w;
  table.partition = z;
  for (double& p : table.probability) p /= z;
  return table;
}

int GibbsTable::find_state(const std::vector<int>& sorted_indices) const {
  // States are generated in lexicographic order of their index sets.
  auto it = std::lower_bound(states.begin(), states.end(), sorted_indices);
  if (it == states.end() || *it != sorted_indices) return -1;
  return static_cast<int>(it - states.begin());
}

double detailed_balance_max_violation(const GibbsTable& table) {
  double worst = 0.0;
  for (std::size_t s = 0; s < table.states.size(); ++s) {
    const std::vector<int>& eta = table.states[s];
    const int n = static_cast<int>(table.cycles.entries.size());
    for (int c = 0; c < n; ++c) {
      if (std::find(eta.begin(), eta.end(), c) != eta.end()) continue;
      bool ok = true;
      for (int j : eta)
        if (!compatible(table.cycles.entries[static_cast<std::size_t>(j)].cycle,
                        table.cycles.entries[static_cast<std::size_t>(c)].cycle)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      std::vector<int> up = eta;
      up.insert(std::upper_bound(up.begin(), up.end(), c), c);
      int t = table.find_state(up);
      if (t < 0) throw std::logic_error("detailed_balance: missing successor state");
      double lhs = table.probability[s] * table.cycles.entries[static_cast<std::size_t>(c)].weight;
      double rhs = table.probability[static_cast<std::size_t>(t)];
      worst = std::max(worst, std::fabs(lhs - rhs));
    }
  }
  return worst;
}

}  // namespace cyclegas
