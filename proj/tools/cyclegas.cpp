// Command line front end: configuration, orchestration, persistence and
// plot-data emission for the cycle gas toolkit.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "cyclegas/bounds.hpp"
#include "cyclegas/clan.hpp"
#include "cyclegas/config.hpp"
#include "cyclegas/loss_network.hpp"
#include "cyclegas/rng.hpp"
#include "cyclegas/sampler.hpp"
#include "cyclegas/stats.hpp"
#include "cyclegas/version.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace cyclegas;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNotCertified = 3;
constexpr int kExitCap = 4;

std::string hash_hex(const RunConfig& cfg) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::filesystem::path resolve_outdir(const RunConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  if (const char* env = std::getenv("CYCLEGAS_OUTDIR"); env && *env) return env;
  return ".";
}

// Shared provenance block: the run is reproducible from these fields alone.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string potential;
  std::string certificate = "none";
  double beta_upper = std::numeric_limits<double>::quiet_NaN();
  double tail_bound = std::numeric_limits<double>::quiet_NaN();
};

Provenance make_provenance(const RunConfig& cfg, const Potential& v) {
  Provenance p;
  p.config_hash = hash_hex(cfg);
  p.seed = cfg.seed;
  p.potential = potential_id(v);
  return p;
}

json provenance_json(const Provenance& p) {
  json j;
  j["version"] = kVersion;
  j["config_hash"] = p.config_hash;
  j["seed"] = p.seed;
  j["potential"] = p.potential;
  j["certificate"] = p.certificate;
  if (std::isfinite(p.beta_upper)) j["beta_upper"] = p.beta_upper;
  j["catalog_tail_bound"] = std::isfinite(p.tail_bound) ? json(p.tail_bound) : json("inf");
  return j;
}

std::string provenance_line(const Provenance& p) {
  std::string s = "config=" + p.config_hash + " seed=" + std::to_string(p.seed) +
                  " potential=" + p.potential + " certificate=" + p.certificate;
  if (std::isfinite(p.beta_upper)) s += " beta_upper=" + fmt17(p.beta_upper);
  s += " tail_bound=";
  s += std::isfinite(p.tail_bound) ? fmt17(p.tail_bound) : "inf";
  return s;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::filesystem::path prepare_outdir(const RunConfig& cfg) {
  auto dir = resolve_outdir(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string());
  // The merged effective config always sits next to the outputs.
  write_text_file(dir / "config.effective.txt", serialize_config(cfg));
  return dir;
}

// Runs fn(0..n-1) on a bounded pool. Slots are written by index and reduced
// by the caller in index order, so results do not depend on thread count.
template <typename Fn>
void for_each_replica(std::size_t n, int threads, Fn&& fn) {
  if (threads < 2 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int count = std::min<int>(threads, static_cast<int>(std::min<std::size_t>(n, 256)));
  pool.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string permutation_line(const Permutation& sigma) {
  if (sigma.is_identity()) return "id";
  std::string line;
  for (std::size_t i = 0; i < sigma.cycles.size(); ++i) {
    if (i) line += ' ';
    line += format_cycle(sigma.cycles[i]);
  }
  return line;
}

void write_samples_file(const std::filesystem::path& path, const Provenance& p,
                        const std::vector<Permutation>& samples) {
  std::string body = "# " + provenance_line(p) + "\n";
  body += "# one line per replica: cycles of the sampled permutation, or id\n";
  for (const Permutation& s : samples) body += permutation_line(s) + "\n";
  write_text_file(path, body);
}

json histogram_json(const std::map<std::size_t, std::size_t>& h) {
  json j = json::object();
  for (const auto& kv : h) j[std::to_string(kv.first)] = kv.second;
  return j;
}

json int_histogram_json(const std::map<int, std::size_t>& h) {
  json j = json::object();
  for (const auto& kv : h) j[std::to_string(kv.first)] = kv.second;
  return j;
}

json length_histogram_json(const std::map<int, std::uint64_t>& h) {
  json j = json::object();
  for (const auto& kv : h) j[std::to_string(kv.first)] = kv.second;
  return j;
}

json mean_jump_json(const MeanJump& mj) {
  json j;
  j["mean"] = mj.mean;
  j["sigma"] = mj.sigma;
  j["samples"] = mj.samples;
  j["batches"] = mj.batches;
  return j;
}

PlotTable histogram_table(const std::string& name, const std::string& description,
                          const Provenance& p, const std::string& key_column,
                          const std::vector<std::pair<double, double>>& rows) {
  PlotTable t;
  t.name = name;
  t.description = description;
  t.comments = {provenance_line(p)};
  t.columns = {key_column, "count"};
  for (const auto& r : rows) t.rows.push_back({r.first, r.second});
  return t;
}

// ---------------------------------------------------------------- bounds --

int run_bounds(const RunConfig& cfg) {
  auto dir = prepare_outdir(cfg);
  Potential v = make_potential(cfg);

  std::vector<double> alphas;
  if (cfg.alpha_steps > 0) {
    for (int i = 0; i < cfg.alpha_steps; ++i) {
      double t = cfg.alpha_steps == 1
                     ? 0.0
                     : static_cast<double>(i) / static_cast<double>(cfg.alpha_steps - 1);
      alphas.push_back(cfg.alpha_min + t * (cfg.alpha_max - cfg.alpha_min));
    }
  } else {
    alphas.push_back(cfg.alpha);
  }

  struct GridRow {
    double alpha, rho, lower, upper, tail;
    std::optional<SubcriticalityCertificate> cert;
  };
  std::vector<GridRow> grid;
  for (double a : alphas) {
    auto catalog = enumerate_cycles(v, a, cfg.cutoffs);
    GridRow row;
    row.alpha = a;
    row.tail = catalog.tail_bound;
    row.lower = 0.0;
    for (const auto& e : catalog.entries)
      row.lower += static_cast<double>(e.cycle.length()) * e.weight;
    row.upper = std::isfinite(catalog.tail_bound)
                    ? row.lower + catalog.tail_bound
                    : std::numeric_limits<double>::infinity();
    try {
      row.rho = rho(v, a);
    } catch (const std::domain_error&) {
      row.rho = std::numeric_limits<double>::infinity();
    }
    row.cert = certify_subcritical(v, a, &catalog);
    grid.push_back(std::move(row));
  }

  // The file-level fields describe the last grid point (largest alpha).
  Provenance prov = make_provenance(cfg, v);
  prov.tail_bound = grid.back().tail;
  if (grid.back().cert) {
    prov.certificate = bound_method_name(grid.back().cert->method);
    prov.beta_upper = grid.back().cert->beta_upper;
  }

  json j;
  j["provenance"] = provenance_json(prov);
  j["rho0"] = rho0();

  json stars = json::array();
  std::printf("rho0 = %.12f\n", rho0());
  try {
    auto b = alpha_star_upper_rho(v);
    stars.push_back({{"method", bound_method_name(b.method)}, {"value", b.value}});
    std::printf("alpha* (%s) = %.10g\n", bound_method_name(b.method), b.value);
  } catch (const std::domain_error&) {
    // No finite threshold for this potential.
  }
  if (v.kind == Potential::Kind::gaussian) {
    auto b = gaussian_alpha_star_explicit(cfg.dimension);
    double value = b.value / v.scale;
    stars.push_back({{"method", bound_method_name(b.method)}, {"value", value}});
    std::printf("alpha* (%s) = %.10g\n", bound_method_name(b.method), value);
  }
  if (v.is_shifted() && strong_convexity_modulus(v).has_value()) {
    auto b = alpha_star_shift_strongly_convex(v, v.shift);
    stars.push_back({{"method", bound_method_name(b.method)}, {"value", b.value}});
    std::printf("alpha* (%s) = %.10g\n", bound_method_name(b.method), b.value);
  }
  j["alpha_star"] = stars;

  std::printf("%12s %14s %14s %14s  %s\n", "alpha", "rho", "beta_lower", "beta_upper", "method");
  json rows = json::array();
  PlotTable curve;
  curve.name = "beta_vs_alpha";
  curve.description = "beta enclosure and single-jump series by alpha";
  curve.comments = {provenance_line(prov)};
  curve.columns = {"alpha", "rho", "beta_lower", "beta_upper"};
  for (const GridRow& row : grid) {
    const char* method = row.cert ? bound_method_name(row.cert->method) : "none";
    std::printf("%12.6g %14.10g %14.10g %14.10g  %s\n", row.alpha, row.rho, row.lower, row.upper,
                method);
    json jr;
    jr["alpha"] = row.alpha;
    jr["rho"] = std::isfinite(row.rho) ? json(row.rho) : json("inf");
    jr["beta_lower"] = row.lower;
    jr["beta_upper"] = std::isfinite(row.upper) ? json(row.upper) : json("inf");
    jr["tail_bound"] = std::isfinite(row.tail) ? json(row.tail) : json("inf");
    jr["certificate"] = method;
    if (row.cert) jr["beta_certified"] = row.cert->beta_upper;
    rows.push_back(jr);
    curve.rows.push_back({row.alpha, row.rho, row.lower, row.upper});
  }
  j["grid"] = rows;

  emit_plotdata(dir.string(), {curve});
  write_json_file(dir / "bounds.json", j);
  std::printf("wrote %s\n", (dir / "bounds.json").c_str());
  return kExitOk;
}

// ---------------------------------------------------------------- oracle --

int run_oracle(const RunConfig& cfg) {
  auto dir = prepare_outdir(cfg);
  Potential v = make_potential(cfg);
  auto lambda = config_lambda(cfg);
  auto anchored = enumerate_cycles(v, cfg.alpha, cfg.cutoffs);
  auto restricted = catalog_restrict(anchored, lambda);
  auto table = enumerate_g_lambda(restricted);
  double violation = detailed_balance_max_violation(table);

  Provenance prov = make_provenance(cfg, v);
  prov.tail_bound = anchored.tail_bound;
  if (auto cert = certify_subcritical(v, cfg.alpha, &anchored)) {
    prov.certificate = bound_method_name(cert->method);
    prov.beta_upper = cert->beta_upper;
  }

  std::map<std::size_t, std::size_t> occupancy;
  for (const auto& state : table.states) ++occupancy[state.size()];

  json j;
  j["provenance"] = provenance_json(prov);
  j["lambda"] = {{"lo", format_site(lambda.lower)}, {"hi", format_site(lambda.upper)}};
  j["cycles"] = restricted.entries.size();
  j["states"] = table.states.size();
  j["partition"] = table.partition;
  j["empty_probability"] = table.probability.empty() ? 0.0 : table.probability[0];
  j["detailed_balance_max_violation"] = violation;
  j["states_by_cycle_count"] = histogram_json(occupancy);

  write_catalog_file((dir / "catalog.txt").string(), restricted);
  write_json_file(dir / "oracle.json", j);
  std::printf("cycles %zu, states %zu, partition %.12g\n", restricted.entries.size(),
              table.states.size(), table.partition);
  std::printf("detailed balance max violation %.3e\n", violation);
  std::printf("wrote %s\n", (dir / "oracle.json").c_str());
  return kExitOk;
}

// --------------------------------------------------------- sample-finite --

int run_sample_finite(const RunConfig& cfg) {
  auto dir = prepare_outdir(cfg);
  Potential v = make_potential(cfg);
  auto lambda = config_lambda(cfg);
  auto anchored = enumerate_cycles(v, cfg.alpha, cfg.cutoffs);
  auto restricted = catalog_restrict(anchored, lambda);

  Provenance prov = make_provenance(cfg, v);
  prov.tail_bound = anchored.tail_bound;
  if (auto cert = certify_subcritical(v, cfg.alpha, &anchored)) {
    prov.certificate = bound_method_name(cert->method);
    prov.beta_upper = cert->beta_upper;
  }

  std::size_t n = cfg.replicas;
  std::vector<Permutation> samples(n);
  std::vector<std::size_t> cylinders(n, 0);
  for_each_replica(n, cfg.threads, [&](std::size_t r) {
    auto draw = sample_g_lambda_exact(restricted, stream_key(cfg.seed, {0xf1d0u, r}));
    samples[r] = std::move(draw.sigma);
    cylinders[r] = draw.cylinder_count;
  });

  std::vector<std::vector<Cycle>> cycle_samples;
  cycle_samples.reserve(n);
  for (const auto& s : samples) cycle_samples.push_back(s.cycles);
  auto histogram = cycle_length_histogram(cycle_samples, lambda);
  double moved = moved_fraction(cycle_samples, lambda);

  json j;
  j["provenance"] = provenance_json(prov);
  j["lambda"] = {{"lo", format_site(lambda.lower)}, {"hi", format_site(lambda.upper)}};
  j["replicas"] = n;
  double mean_cylinders = 0.0;
  for (std::size_t c : cylinders) mean_cylinders += static_cast<double>(c);
  j["mean_free_cylinders"] = n ? mean_cylinders / static_cast<double>(n) : 0.0;
  j["moved_fraction"] = moved;
  j["cycle_length_histogram"] = length_histogram_json(histogram);

  if (cfg.compare_oracle) {
    auto table = enumerate_g_lambda(restricted);
    std::map<Cycle, int> index;
    for (int i = 0; i < static_cast<int>(restricted.entries.size()); ++i)
      index[restricted.entries[static_cast<std::size_t>(i)].cycle] = i;
    std::vector<std::size_t> counts(table.states.size(), 0);
    for (const auto& s : samples) {
      std::vector<int> state;
      for (const Cycle& c : s.cycles) state.push_back(index.at(c));
      std::sort(state.begin(), state.end());
      int k = table.find_state(state);
      if (k < 0) throw std::logic_error("sampled state missing from enumeration");
      ++counts[static_cast<std::size_t>(k)];
    }
    double tv = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s)
      tv += std::abs(static_cast<double>(counts[s]) / static_cast<double>(n) -
                     table.probability[s]);
    tv *= 0.5;
    j["oracle"] = {{"states", table.states.size()}, {"tv_distance", tv}};
    std::printf("tv distance vs enumeration: %.6f over %zu states\n", tv, table.states.size());
  }

  std::vector<std::pair<double, double>> hist_rows;
  for (const auto& kv : histogram)
    hist_rows.push_back({static_cast<double>(kv.first), static_cast<double>(kv.second)});
  emit_plotdata(dir.string(),
                {histogram_table("cycle_length_histogram", "window sites by containing cycle length",
                                 prov, "length", hist_rows)});

  write_samples_file(dir / "samples.txt", prov, samples);
  write_json_file(dir / "sample_finite.json", j);
  std::printf("%zu exact draws, moved fraction %.6f\n", n, moved);
  std::printf("wrote %s\n", (dir / "sample_finite.json").c_str());
  return kExitOk;
}

// -------------------------------------------------------- sample-perfect --

SampleOptions sample_options(const RunConfig& cfg) {
  SampleOptions opts;
  opts.max_clan_nodes = cfg.max_clan_nodes;
  opts.allow_uncertified = cfg.allow_uncertified;
  return opts;
}

void fill_certificate(Provenance& prov, const PreparedSampler& prep) {
  prov.tail_bound = prep.anchored.tail_bound;
  if (prep.certified) {
    prov.certificate = bound_method_name(prep.certificate.method);
    prov.beta_upper = prep.certificate.beta_upper;
  } else {
    prov.certificate = "UNCERTIFIED";
  }
}

int run_sample_perfect(const RunConfig& cfg) {
  auto dir = prepare_outdir(cfg);
  Potential v = make_potential(cfg);
  auto window = config_window(cfg);
  SampleOptions opts = sample_options(cfg);
  PreparedSampler prep = prepare_sampler(v, cfg.alpha, cfg.cutoffs, opts);

  Provenance prov = make_provenance(cfg, v);
  fill_certificate(prov, prep);

  std::size_t n = cfg.replicas;
  std::vector<Permutation> samples(n);
  std::vector<std::map<Site, Site>> maps(n);
  std::vector<std::size_t> clan_nodes(n, 0);
  std::vector<int> clan_depth(n, 0);
  bool shifted_run = !cfg.shift.empty() && !is_zero(cfg.shift);

  for_each_replica(n, cfg.threads, [&](std::size_t r) {
    std::uint64_t seed = stream_key(cfg.seed, {0x9e7fu, r});
    if (shifted_run) {
      auto draw = sample_mu_v_window(prep, cfg.shift, window, seed, opts);
      samples[r] = draw.gas.sigma;
      maps[r] = std::move(draw.composed);
      clan_nodes[r] = draw.gas.clan_nodes;
      clan_depth[r] = draw.gas.clan_depth;
    } else {
      auto draw = sample_mu_window(prep, window, seed, opts);
      maps[r] = window_map(draw.sigma.cycles, window);
      samples[r] = std::move(draw.sigma);
      clan_nodes[r] = draw.clan_nodes;
      clan_depth[r] = draw.clan_depth;
    }
  });

  std::map<std::size_t, std::size_t> size_hist;
  std::map<int, std::size_t> depth_hist;
  for (std::size_t r = 0; r < n; ++r) {
    ++size_hist[clan_nodes[r]];
    ++depth_hist[clan_depth[r]];
  }
  std::vector<std::vector<Cycle>> cycle_samples;
  cycle_samples.reserve(n);
  for (const auto& s : samples) cycle_samples.push_back(s.cycles);
  auto histogram = cycle_length_histogram(cycle_samples, window);

  json j;
  j["provenance"] = provenance_json(prov);
  j["window"] = {{"lo", format_site(window.lower)}, {"hi", format_site(window.upper)}};
  j["replicas"] = n;
  j["shift"] = cfg.shift.empty() ? "none" : format_site(cfg.shift);
  std::optional<MeanJump> mj;
  if (n >= 2) {
    mj = mean_jump(maps, window);
    j["mean_jump"] = mean_jump_json(*mj);
  }
  j["moved_fraction"] = moved_fraction(cycle_samples, window);
  j["cycle_length_histogram"] = length_histogram_json(histogram);
  j["clan_size_histogram"] = histogram_json(size_hist);
  j["clan_depth_histogram"] = int_histogram_json(depth_hist);

  std::vector<PlotTable> tables;
  std::vector<std::pair<double, double>> rows;
  for (const auto& kv : size_hist)
    rows.push_back({static_cast<double>(kv.first), static_cast<double>(kv.second)});
  tables.push_back(histogram_table("clan_size_histogram", "clans by node count", prov,
                                   "nodes", rows));
  rows.clear();
  for (const auto& kv : histogram)
    rows.push_back({static_cast<double>(kv.first), static_cast<double>(kv.second)});
  tables.push_back(histogram_table("cycle_length_histogram",
                                   "window sites by containing cycle length", prov, "length",
                                   rows));

  if (!cfg.radii.empty()) {
    auto curve = thermodynamic_coupling(v, cfg.alpha, cfg.cutoffs, window, cfg.radii,
                                        cfg.replicas, cfg.seed, opts);
    json agreement = json::array();
    PlotTable t;
    t.name = "agreement_vs_lambda";
    t.description = "window disagreement between the full gas and growing boxes";
    t.comments = {provenance_line(prov)};
    t.columns = {"radius", "disagreements", "replicas", "fraction"};
    for (const auto& point : curve) {
      agreement.push_back({{"radius", point.radius},
                           {"disagreements", point.disagreements},
                           {"replicas", point.replicas}});
      t.rows.push_back({static_cast<double>(point.radius),
                        static_cast<double>(point.disagreements),
                        static_cast<double>(point.replicas),
                        static_cast<double>(point.disagreements) /
                            static_cast<double>(point.replicas)});
    }
    j["agreement"] = agreement;
    tables.push_back(t);
  }

  emit_plotdata(dir.string(), tables);
  write_samples_file(dir / "samples.txt", prov, samples);
  write_json_file(dir / "sample_perfect.json", j);
  std::printf("%zu window draws, certificate %s\n", n, prov.certificate.c_str());
  if (mj) {
    std::printf("mean jump (");
    for (std::size_t k = 0; k < mj->mean.size(); ++k)
      std::printf("%s%.6f", k ? ", " : "", mj->mean[k]);
    std::printf(")\n");
  }
  std::printf("wrote %s\n", (dir / "sample_perfect.json").c_str());
  return kExitOk;
}

// ----------------------------------------------------------------- stats --

int run_stats(const RunConfig& cfg) {
  auto dir = prepare_outdir(cfg);
  Potential v = make_potential(cfg);
  auto window = config_window(cfg);
  SampleOptions opts = sample_options(cfg);
  PreparedSampler prep = prepare_sampler(v, cfg.alpha, cfg.cutoffs, opts);

  Provenance prov = make_provenance(cfg, v);
  fill_certificate(prov, prep);
  bool shifted_run = !cfg.shift.empty() && !is_zero(cfg.shift);

  struct ReplicaStats {
    bool capped = false;
    std::vector<double> mass;
    std::vector<double> count;
    std::size_t nodes = 0;
    int depth = 0;
    int radius = 0;
    std::map<Site, Site> window_map;
    std::vector<Cycle> cycles;
  };

  std::size_t n = cfg.replicas;
  std::vector<ReplicaStats> slots(n);
  auto sites = window.sites();
  // Same per-replica substreams as the aggregated clan statistics, so both
  // paths describe the identical set of realizations.
  for_each_replica(n, cfg.threads, [&](std::size_t r) {
    ReplicaStats& out = slots[r];
    CylinderField field(prep.anchored, stream_key(cfg.seed, {0x9e4e5u, r}));
    Clan clan;
    try {
      clan = build_clan(field, window, opts.max_clan_nodes);
    } catch (const std::length_error&) {
      out.capped = true;
      return;
    }
    auto generations = clan_generations(clan);
    for (std::size_t i = 0; i < clan.nodes.size(); ++i) {
      auto g = static_cast<std::size_t>(generations[i]);
      if (out.mass.size() <= g) {
        out.mass.resize(g + 1, 0.0);
        out.count.resize(g + 1, 0.0);
      }
      out.mass[g] += static_cast<double>(clan.nodes[i].cycle.length());
      out.count[g] += 1.0;
      out.depth = std::max(out.depth, generations[i]);
      for (const Site& s : clan.nodes[i].cycle.sites)
        out.radius = std::max(out.radius, static_cast<int>(linf(s)));
    }
    out.nodes = clan.nodes.size();
    auto fates = classify(clan);
    out.cycles = kept_root_cycles(clan, fates);
    if (shifted_run) {
      for (const Site& x : sites) out.window_map[x] = x;
      for (const Cycle& c : out.cycles)
        for (const Site& x : c.sites)
          if (window.contains(x)) out.window_map[x] = apply_cycle(c, x);
      for (auto& kv : out.window_map) kv.second = add(kv.second, cfg.shift);
    } else {
      out.window_map = window_map(out.cycles, window);
    }
  });

  // Ordered reduction keeps every aggregate independent of the thread count.
  std::vector<double> generation_mass, generation_count;
  std::map<std::size_t, std::size_t> size_hist;
  std::map<int, std::size_t> depth_hist;
  std::size_t capped = 0;
  int max_radius = 0;
  std::vector<std::map<Site, Site>> maps;
  std::vector<std::vector<Cycle>> cycle_samples;
  for (const ReplicaStats& s : slots) {
    if (s.capped) {
      ++capped;
      continue;
    }
    if (generation_mass.size() < s.mass.size()) {
      generation_mass.resize(s.mass.size(), 0.0);
      generation_count.resize(s.mass.size(), 0.0);
    }
    for (std::size_t g = 0; g < s.mass.size(); ++g) {
      generation_mass[g] += s.mass[g];
      generation_count[g] += s.count[g];
    }
    ++size_hist[s.nodes];
    ++depth_hist[s.depth];
    max_radius = std::max(max_radius, s.radius);
    maps.push_back(s.window_map);
    cycle_samples.push_back(s.cycles);
  }

  json j;
  j["provenance"] = provenance_json(prov);
  j["window"] = {{"lo", format_site(window.lower)}, {"hi", format_site(window.upper)}};
  j["replicas"] = n;
  j["clans_capped"] = capped;
  j["shift"] = cfg.shift.empty() ? "none" : format_site(cfg.shift);
  j["generation_mass"] = generation_mass;
  j["generation_count"] = generation_count;
  json ratios = json::array();
  for (std::size_t g = 0; g + 1 < generation_mass.size(); ++g)
    if (generation_mass[g] > 0.0) ratios.push_back(generation_mass[g + 1] / generation_mass[g]);
  j["generation_mass_ratios"] = ratios;
  j["clan_size_histogram"] = histogram_json(size_hist);
  j["clan_depth_histogram"] = int_histogram_json(depth_hist);
  j["max_spatial_radius"] = max_radius;
  if (maps.size() >= 2) j["mean_jump"] = mean_jump_json(mean_jump(maps, window));
  if (!cycle_samples.empty()) {
    j["moved_fraction"] = moved_fraction(cycle_samples, window);
    j["cycle_length_histogram"] =
        length_histogram_json(cycle_length_histogram(cycle_samples, window));
  }

  std::vector<PlotTable> tables;
  PlotTable gen;
  gen.name = "generation_mass";
  gen.description = "summed clan site mass and node count by generation";
  gen.comments = {provenance_line(prov)};
  gen.columns = {"generation", "mass", "count"};
  for (std::size_t g = 0; g < generation_mass.size(); ++g)
    gen.rows.push_back({static_cast<double>(g), generation_mass[g], generation_count[g]});
  tables.push_back(gen);

  std::vector<std::pair<double, double>> rows;
  for (const auto& kv : size_hist)
    rows.push_back({static_cast<double>(kv.first), static_cast<double>(kv.second)});
  tables.push_back(histogram_table("clan_size_histogram", "clans by node count", prov,
                                   "nodes", rows));
  rows.clear();
  for (const auto& kv : depth_hist)
    rows.push_back({static_cast<double>(kv.first), static_cast<double>(kv.second)});
  tables.push_back(histogram_table("clan_depth_histogram", "clans by maximal generation", prov,
                                   "depth", rows));

  if (!cfg.radii.empty()) {
    auto curve = thermodynamic_coupling(v, cfg.alpha, cfg.cutoffs, window, cfg.radii,
                                        cfg.replicas, cfg.seed, opts);
    json agreement = json::array();
    PlotTable t;
    t.name = "agreement_vs_lambda";
    t.description = "window disagreement between the full gas and growing boxes";
    t.comments = {provenance_line(prov)};
    t.columns = {"radius", "disagreements", "replicas", "fraction"};
    for (const auto& point : curve) {
      agreement.push_back({{"radius", point.radius},
                           {"disagreements", point.disagreements},
                           {"replicas", point.replicas}});
      t.rows.push_back({static_cast<double>(point.radius),
                        static_cast<double>(point.disagreements),
                        static_cast<double>(point.replicas),
                        static_cast<double>(point.disagreements) /
                            static_cast<double>(point.replicas)});
    }
    j["agreement"] = agreement;
    tables.push_back(t);
  }

  if (!cfg.t_backs.empty()) {
    auto lambda = config_lambda(cfg);
    auto restricted = catalog_restrict(prep.anchored, lambda);
    auto curve = uniqueness_forward_coupling(restricted, window, cfg.t_backs, cfg.replicas,
                                             cfg.seed);
    json memory = json::array();
    PlotTable t;
    t.name = "memory_loss";
    t.description = "window disagreement against the stationary run by start depth";
    t.comments = {provenance_line(prov)};
    t.columns = {"t_back", "disagreements", "replicas", "fraction"};
    for (const auto& point : curve) {
      memory.push_back({{"t_back", point.t_back},
                        {"disagreements", point.disagreements},
                        {"replicas", point.replicas}});
      t.rows.push_back({point.t_back, static_cast<double>(point.disagreements),
                        static_cast<double>(point.replicas),
                        static_cast<double>(point.disagreements) /
                            static_cast<double>(point.replicas)});
    }
    j["memory_loss"] = memory;
    tables.push_back(t);
  }

  emit_plotdata(dir.string(), tables);
  write_json_file(dir / "stats.json", j);
  std::printf("%zu clans (%zu capped), certificate %s\n", n, capped, prov.certificate.c_str());
  if (!generation_mass.empty()) {
    std::printf("generation mass:");
    for (double m : generation_mass) std::printf(" %.4g", m);
    std::printf("\n");
  }
  std::printf("wrote %s\n", (dir / "stats.json").c_str());
  return kExitOk;
}

// ------------------------------------------------------------------ main --

struct CommonArgs {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void attach_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("config,--config,-c", args.config_path,
                  "configuration file (key = value lines)");
  auto push = [&args](const char* key) {
    return [key, &args](const std::string& value) { args.overrides.emplace_back(key, value); };
  };
  // trigger_on_parse fires per occurrence in command line order, so a
  // repeated flag overrides the earlier value instead of erroring out.
  auto opt = [&](const std::string& name, const char* key, const std::string& desc) {
    sub->add_option_function<std::string>(name, push(key), desc)->trigger_on_parse();
  };
  opt("--dimension", "dimension", "lattice dimension");
  opt("--potential", "potential", "gaussian | powerlaw | nearest_neighbor | table");
  opt("--scale", "scale", "gaussian scale factor");
  opt("--exponent", "exponent", "powerlaw exponent");
  opt("--table", "table", "table potential data file");
  opt("--alpha", "alpha", "inverse temperature");
  opt("--alpha-min", "alpha_min", "alpha grid start");
  opt("--alpha-max", "alpha_max", "alpha grid end");
  opt("--alpha-steps", "alpha_steps", "alpha grid size");
  opt("--shift", "shift", "boundary shift vector, e.g. (1,0)");
  opt("--window-lo", "window.lo", "window lower corner");
  opt("--window-hi", "window.hi", "window upper corner");
  opt("--lambda-lo", "lambda.lo", "finite volume lower corner");
  opt("--lambda-hi", "lambda.hi", "finite volume upper corner");
  opt("--radii", "lambda.radii", "coupling box radii, comma separated");
  opt("--t-backs", "t_backs", "memory loss start depths, comma separated");
  opt("--max-length", "cutoffs.max_length", "cycle length cutoff");
  opt("--max-jump", "cutoffs.max_jump", "euclidean jump cutoff");
  opt("--min-weight", "cutoffs.min_weight", "cycle weight cutoff");
  opt("--replicas", "replicas", "number of replicas");
  opt("--seed", "seed", "master seed");
  opt("--threads", "threads", "worker pool size");
  opt("--max-clan-nodes", "max_clan_nodes", "ancestor clan node cap");
  opt("--out", "out", "output directory");
  sub->add_flag_callback(
      "--allow-uncertified",
      [&args] { args.overrides.emplace_back("allow_uncertified", "true"); },
      "sample even without a subcriticality certificate (outputs say UNCERTIFIED)");
  sub->add_flag_callback(
      "--compare-oracle",
      [&args] { args.overrides.emplace_back("compare_oracle", "true"); },
      "sample-finite: report the TV distance against full enumeration");
  sub->add_option_function<std::string>(
      "--set", [&args](const std::string& kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw CLI::ValidationError("--set", "expected key=value");
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!value.empty() && value.front() == ' ') value.erase(value.begin());
        args.overrides.emplace_back(key, value);
      },
      "any config assignment key=value (repeatable, applied in flag order)")
      ->trigger_on_parse();
}

RunConfig build_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = read_config_file(args.config_path);
  // Site values parse against the dimension, so dimension overrides go first.
  for (const auto& [key, value] : args.overrides)
    if (key == "dimension") apply_config_kv(cfg, key, value);
  for (const auto& [key, value] : args.overrides)
    if (key != "dimension") apply_config_kv(cfg, key, value);
  validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cycle gas simulator and numerical bounds toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonArgs args;
  auto* bounds_cmd =
      app.add_subcommand("bounds", "subcriticality table: rho, beta enclosure, alpha* bounds");
  auto* oracle_cmd =
      app.add_subcommand("oracle", "exhaustive finite-volume enumeration and detailed balance");
  auto* finite_cmd =
      app.add_subcommand("sample-finite", "exact finite-volume draws on the lambda box");
  auto* perfect_cmd =
      app.add_subcommand("sample-perfect", "infinite-volume window draws via ancestor clans");
  auto* stats_cmd =
      app.add_subcommand("stats", "aggregated clan statistics, coupling and memory loss curves");
  for (CLI::App* sub : {bounds_cmd, oracle_cmd, finite_cmd, perfect_cmd, stats_cmd})
    attach_common(sub, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg = build_config(args);
    if (bounds_cmd->parsed()) return run_bounds(cfg);
    if (oracle_cmd->parsed()) return run_oracle(cfg);
    if (finite_cmd->parsed()) return run_sample_finite(cfg);
    if (perfect_cmd->parsed()) return run_sample_perfect(cfg);
    if (stats_cmd->parsed()) return run_stats(cfg);
    std::fprintf(stderr, "no subcommand\n");
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::length_error& e) {
    std::fprintf(stderr, "cap exceeded: %s\n", e.what());
    return kExitCap;
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()).find("not certified subcritical") != std::string::npos) {
      std::fprintf(stderr, "refusing to sample: %s (use --allow-uncertified to override)\n",
                   e.what());
      return kExitNotCertified;
    }
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
