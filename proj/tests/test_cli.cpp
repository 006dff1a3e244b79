// End-to-end checks of the command line tool: exit codes, output files,
// provenance lines, determinism across reruns and thread counts, and
// agreement between the stats subcommand and the library aggregates.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cyclegas/sampler.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cyclegas;

namespace {

fs::path scratch_root() {
  fs::path dir = fs::temp_directory_path() / "cyclegas_cli_tests";
  return dir;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = scratch_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env.empty() ? std::string(CYCLEGAS_CLI_PATH) : env + " " + CYCLEGAS_CLI_PATH;
  cmd += " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) { return json::parse(slurp(path)); }

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

// Data rows of a CSV as doubles, skipping '#' comments and the header.
std::vector<std::vector<double>> csv_rows(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("cli version and bad invocations") {
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);                     // missing subcommand
  CHECK(run_cli("frobnicate") == 2);           // unknown subcommand
  CHECK(run_cli("bounds --alpha") == 2);       // flag without value
  CHECK(run_cli("bounds --alpha fast --out " + fresh_dir("bad1").string()) == 2);
  CHECK(run_cli("bounds --potential coulomb --out " + fresh_dir("bad2").string()) == 2);
  CHECK(run_cli("bounds --set granularity=3 --out " + fresh_dir("bad3").string()) == 2);
  CHECK(run_cli("oracle --alpha 1.0 --out " + fresh_dir("bad4").string()) == 2);  // no lambda
}

TEST_CASE("cli bounds writes table, csv and provenance") {
  fs::path dir = fresh_dir("bounds_single");
  int rc = run_cli("bounds --dimension 2 --potential gaussian --alpha 2.5 --max-length 4 "
                   "--max-jump 1.0 --out " + dir.string());
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "config.effective.txt"));
  CHECK(fs::exists(dir / "plotdata.schema.txt"));

  json j = read_json(dir / "bounds.json");
  // The closed-form gaussian threshold for d = 2 sits near 76.917.
  bool found_explicit = false;
  for (const auto& star : j["alpha_star"]) {
    if (star["method"] == "gaussian_explicit") {
      found_explicit = true;
      CHECK(star["value"].get<double>() == doctest::Approx(76.9176).epsilon(1e-3));
    }
  }
  CHECK(found_explicit);
  CHECK(j["rho0"].get<double>() == doctest::Approx(0.44504).epsilon(1e-4));
  CHECK(j["provenance"]["certificate"] != "none");

  std::string csv = slurp(dir / "beta_vs_alpha.csv");
  CHECK(contains(csv, "# config="));
  CHECK(contains(csv, "tail_bound="));
  CHECK(contains(csv, "alpha,rho,beta_lower,beta_upper"));
  CHECK(contains(slurp(dir / "plotdata.schema.txt"), "beta_vs_alpha.csv"));

  std::string effective = slurp(dir / "config.effective.txt");
  CHECK(contains(effective, "alpha = 2.5"));
  CHECK(contains(effective, "dimension = 2"));
}

TEST_CASE("cli bounds grid is monotone in beta") {
  fs::path dir = fresh_dir("bounds_grid");
  int rc = run_cli("bounds --dimension 2 --potential gaussian --alpha-min 1.5 --alpha-max 3.0 "
                   "--alpha-steps 4 --max-length 4 --max-jump 1.0 --out " + dir.string());
  CHECK(rc == 0);
  auto rows = csv_rows(dir / "beta_vs_alpha.csv");
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    CHECK(rows[i][0] < rows[i + 1][0]);  // alpha ascending
    CHECK(rows[i][2] > rows[i + 1][2]);  // beta_lower descending
    CHECK(rows[i][3] > rows[i + 1][3]);  // beta_upper descending
  }
}

TEST_CASE("cli config file plus set overrides") {
  fs::path dir = fresh_dir("cfgfile");
  fs::path cfg = dir / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "# base configuration\n";
    out << "dimension = 2\n";
    out << "alpha = 2.5\n";
    out << "cutoffs.max_length = 4\n";
    out << "cutoffs.max_jump = 1.0\n";
  }
  int rc = run_cli("bounds " + cfg.string() + " --set alpha=3.0 --out " + dir.string());
  CHECK(rc == 0);
  std::string effective = slurp(dir / "config.effective.txt");
  CHECK(contains(effective, "alpha = 3\n"));
  CHECK(contains(effective, "cutoffs.max_length = 4"));
}

TEST_CASE("cli oracle reports enumeration and detailed balance") {
  fs::path dir = fresh_dir("oracle");
  int rc = run_cli("oracle --dimension 1 --potential gaussian --alpha 1.0 "
                   "--lambda-lo '(0)' --lambda-hi '(1)' --max-length 4 --max-jump 1.0 "
                   "--out " + dir.string());
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "catalog.txt"));
  json j = read_json(dir / "oracle.json");
  CHECK(j["cycles"].get<int>() == 1);  // one transposition fits in {0,1}
  CHECK(j["states"].get<int>() == 2);
  CHECK(j["detailed_balance_max_violation"].get<double>() <= 1e-12);
  CHECK(j["provenance"]["seed"].get<std::uint64_t>() == 1);
}

TEST_CASE("cli sample-finite is deterministic and matches its oracle") {
  std::string base = "sample-finite --dimension 1 --potential gaussian --alpha 0.8 "
                     "--lambda-lo '(-3)' --lambda-hi '(3)' --max-length 4 --max-jump 1.0 "
                     "--replicas 40 --seed 5 --compare-oracle";
  fs::path a = fresh_dir("finite_a");
  fs::path b = fresh_dir("finite_b");
  fs::path c = fresh_dir("finite_c");
  fs::path d = fresh_dir("finite_d");
  CHECK(run_cli(base + " --out " + a.string()) == 0);
  CHECK(run_cli(base + " --out " + b.string()) == 0);
  CHECK(run_cli(base + " --threads 4 --out " + c.string()) == 0);
  CHECK(run_cli(base + " --seed 6 --out " + d.string()) == 0);

  // Same config and seed: byte-identical artifacts, independent of threads.
  for (const char* name : {"samples.txt", "sample_finite.json", "cycle_length_histogram.csv"}) {
    CHECK(slurp(a / name) == slurp(b / name));
    CHECK(slurp(a / name) == slurp(c / name));
  }
  CHECK(slurp(a / "samples.txt") != slurp(d / "samples.txt"));

  json j = read_json(a / "sample_finite.json");
  CHECK(j["replicas"].get<int>() == 40);
  CHECK(j["oracle"]["tv_distance"].get<double>() < 0.5);
  CHECK(j["oracle"]["states"].get<int>() > 5);
  double total = 0.0;
  for (const auto& kv : j["cycle_length_histogram"].items()) total += kv.value().get<double>();
  CHECK(total == 7.0 * 40.0);  // |lambda| sites per replica
  CHECK(contains(slurp(a / "samples.txt"), "# config="));
}

TEST_CASE("cli sample-perfect refuses without certificate and labels overrides") {
  fs::path dir = fresh_dir("gate");
  std::string window = "--window-lo '(0,0)' --window-hi '(1,1)' ";
  int rc = run_cli("sample-perfect --dimension 2 --potential nearest_neighbor --alpha 0.25 " +
                   window + "--max-length 4 --max-jump 1.0 --replicas 5 --out " + dir.string());
  CHECK(rc == 3);

  // Subcritical in truth but with no certificate at these cutoffs: the
  // override runs and every artifact says UNCERTIFIED.
  fs::path dir2 = fresh_dir("gate_override");
  rc = run_cli("sample-perfect --dimension 2 --potential nearest_neighbor --alpha 1.3 " + window +
               "--max-length 4 --max-jump 1.0 --replicas 30 --seed 3 --allow-uncertified --out " +
               dir2.string());
  CHECK(rc == 0);
  CHECK(contains(slurp(dir2 / "sample_perfect.json"), "UNCERTIFIED"));
  CHECK(contains(slurp(dir2 / "samples.txt"), "certificate=UNCERTIFIED"));
}

TEST_CASE("cli sample-perfect with shift writes mean jump and coupling curve") {
  fs::path dir = fresh_dir("perfect_shift");
  int rc = run_cli("sample-perfect --dimension 2 --potential gaussian --alpha 2.5 "
                   "--shift '(1,0)' --window-lo '(0,0)' --window-hi '(1,1)' "
                   "--max-length 4 --max-jump 1.0 --replicas 50 --seed 11 --radii 2,4 "
                   "--threads 2 --out " + dir.string());
  CHECK(rc == 0);
  json j = read_json(dir / "sample_perfect.json");
  CHECK(j["shift"] == "(1,0)");
  CHECK(j["provenance"]["certificate"] != "none");
  CHECK(j["provenance"]["certificate"] != "UNCERTIFIED");
  REQUIRE(j.contains("mean_jump"));
  // Composed samples shift every site by (1,0) plus a rare gas jump.
  CHECK(j["mean_jump"]["mean"][0].get<double>() == doctest::Approx(1.0).epsilon(0.2));
  CHECK(j["mean_jump"]["mean"][1].get<double>() == doctest::Approx(0.0).epsilon(0.2));
  REQUIRE(j["agreement"].size() == 2);
  CHECK(j["agreement"][0]["radius"].get<int>() == 2);
  CHECK(fs::exists(dir / "agreement_vs_lambda.csv"));
  CHECK(fs::exists(dir / "clan_size_histogram.csv"));
  CHECK(csv_rows(dir / "agreement_vs_lambda.csv").size() == 2);

  // Replica count parity: histogram masses add up to the replica count.
  double clans = 0.0;
  for (const auto& kv : j["clan_size_histogram"].items()) clans += kv.value().get<double>();
  CHECK(clans == 50.0);
}

TEST_CASE("cli sample-perfect clan cap maps to exit 4") {
  fs::path dir = fresh_dir("cap");
  int rc = run_cli("sample-perfect --dimension 2 --potential gaussian --alpha 2.5 "
                   "--window-lo '(-2,-2)' --window-hi '(2,2)' --max-length 4 --max-jump 1.0 "
                   "--replicas 2000 --seed 1 --max-clan-nodes 1 --out " + dir.string());
  CHECK(rc == 4);
}

TEST_CASE("cli stats matches the library clan statistics replica for replica") {
  fs::path dir = fresh_dir("stats");
  int rc = run_cli("stats --dimension 2 --potential gaussian --alpha 2.5 "
                   "--window-lo '(-1,-1)' --window-hi '(1,1)' --max-length 4 --max-jump 1.0 "
                   "--replicas 60 --seed 19 --threads 3 "
                   "--lambda-lo '(-2,-2)' --lambda-hi '(2,2)' --radii 2 --t-backs 0.5,2.0 "
                   "--out " + dir.string());
  CHECK(rc == 0);
  for (const char* name : {"stats.json", "generation_mass.csv", "clan_size_histogram.csv",
                           "clan_depth_histogram.csv", "agreement_vs_lambda.csv",
                           "memory_loss.csv", "plotdata.schema.txt"})
    CHECK(fs::exists(dir / name));

  json j = read_json(dir / "stats.json");

  Potential v = gaussian_potential(2, 1.0);
  Cutoffs cut{4, 1.0, 0.0};
  PreparedSampler prep = prepare_sampler(v, 2.5, cut);
  BoxRegion window = BoxRegion::box({-1, -1}, {1, 1});
  ClanStatistics reference = clan_statistics(prep, window, 60, 19);

  // Same substreams, so the aggregates agree exactly (integer site masses).
  REQUIRE(j["generation_mass"].size() == reference.generation_mass.size());
  for (std::size_t g = 0; g < reference.generation_mass.size(); ++g) {
    CHECK(j["generation_mass"][g].get<double>() == reference.generation_mass[g]);
    CHECK(j["generation_count"][g].get<double>() == reference.generation_count[g]);
  }
  CHECK(j["clans_capped"].get<std::size_t>() == reference.clans_capped);
  CHECK(j["max_spatial_radius"].get<int>() == reference.max_spatial_radius);
  std::map<std::string, std::size_t> sizes;
  for (const auto& kv : reference.size_histogram) sizes[std::to_string(kv.first)] = kv.second;
  for (const auto& kv : j["clan_size_histogram"].items())
    CHECK(sizes.at(kv.key()) == kv.value().get<std::size_t>());
  CHECK(j["clan_size_histogram"].size() == sizes.size());

  auto memory = csv_rows(dir / "memory_loss.csv");
  REQUIRE(memory.size() == 2);
  CHECK(memory[0][0] == 0.5);
  CHECK(memory[1][0] == 2.0);
}

TEST_CASE("cli honors the output directory environment variable") {
  fs::path dir = fresh_dir("envdir");
  int rc = run_cli("bounds --dimension 1 --potential gaussian --alpha 2.0 --max-length 4 "
                   "--max-jump 1.0", "CYCLEGAS_OUTDIR=" + dir.string());
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "bounds.json"));
  CHECK(fs::exists(dir / "config.effective.txt"));
}
