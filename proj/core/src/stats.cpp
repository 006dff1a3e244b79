#include "cyclegas/stats.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

namespace cyclegas {

MeanJump mean_jump(const std::vector<std::map<Site, Site>>& samples, const BoxRegion& window,
                   std::size_t batches) {
  if (samples.size() < 2) throw std::invalid_argument("too few samples");
  if (window.whole_lattice) throw std::invalid_argument("mean_jump: window must be a finite box");
  const std::vector<Site> sites = window.sites();
  const std::size_t d = sites.empty() ? 0 : sites.front().size();
  const std::size_t n = samples.size();
  if (batches < 2) batches = 2;
  if (batches > n) batches = n;

  // Per-sample window average, then equal-weight averaging across samples;
  // every sample covers the same sites so the two-stage mean is exact.
  std::vector<std::vector<double>> per_sample(n, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (const Site& x : sites) {
      auto it = samples[i].find(x);
      if (it == samples[i].end()) continue;  // fixed point, zero jump
      for (std::size_t k = 0; k < d; ++k)
        per_sample[i][k] += static_cast<double>(it->second[k]) - static_cast<double>(x[k]);
    }
    for (std::size_t k = 0; k < d; ++k) per_sample[i][k] /= static_cast<double>(sites.size());
  }

  MeanJump out;
  out.samples = n;
  out.batches = batches;
  out.mean.assign(d, 0.0);
  for (const std::vector<double>& s : per_sample)
    for (std::size_t k = 0; k < d; ++k) out.mean[k] += s[k];
  for (std::size_t k = 0; k < d; ++k) out.mean[k] /= static_cast<double>(n);

  std::vector<std::vector<double>> batch_mean(batches, std::vector<double>(d, 0.0));
  std::vector<std::size_t> batch_count(batches, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t b = i * batches / n;
    ++batch_count[b];
    for (std::size_t k = 0; k < d; ++k) batch_mean[b][k] += per_sample[i][k];
  }
  out.sigma.assign(d, 0.0);
  for (std::size_t b = 0; b < batches; ++b)
    for (std::size_t k = 0; k < d; ++k) {
      batch_mean[b][k] /= static_cast<double>(batch_count[b]);
      double dev = batch_mean[b][k] - out.mean[k];
      out.sigma[k] += dev * dev;
    }
  for (std::size_t k = 0; k < d; ++k)
    out.sigma[k] = std::sqrt(out.sigma[k] / static_cast<double>(batches - 1) /
                             static_cast<double>(batches));
  return out;
}

namespace {

// Window sites covered by the sample's cycles, with overlap rejection.
std::map<Site, int> covered_lengths(const std::vector<Cycle>& cycles, const BoxRegion& window) {
  std::map<Site, int> len;
  for (const Cycle& c : cycles)
    for (const Site& s : c.sites)
      if (window.contains(s)) {
        if (!len.emplace(s, static_cast<int>(c.sites.size())).second)
          throw std::invalid_argument("overlapping cycles in a sample");
      }
  return len;
}

}  // namespace

std::map<int, std::uint64_t> cycle_length_histogram(const std::vector<std::vector<Cycle>>& samples,
                                                    const BoxRegion& window) {
  if (samples.empty()) throw std::invalid_argument("too few samples");
  const std::uint64_t volume = window.volume();
  std::map<int, std::uint64_t> hist;
  for (const std::vector<Cycle>& sample : samples) {
    std::map<Site, int> len = covered_lengths(sample, window);
    for (const auto& kv : len) ++hist[kv.second];
    hist[1] += volume - static_cast<std::uint64_t>(len.size());
  }
  return hist;
}

double moved_fraction(const std::vector<std::vector<Cycle>>& samples, const BoxRegion& window) {
  if (samples.empty()) throw std::invalid_argument("too few samples");
  const std::uint64_t volume = window.volume();
  std::uint64_t moved = 0;
  for (const std::vector<Cycle>& sample : samples)
    moved += static_cast<std::uint64_t>(covered_lengths(sample, window).size());
  return static_cast<double>(moved) /
         (static_cast<double>(volume) * static_cast<double>(samples.size()));
}

void emit_plotdata(const std::string& directory, const std::vector<PlotTable>& tables) {
  std::filesystem::path dir(directory);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + directory);

  auto fmt = [](double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };

  std::ofstream schema(dir / "plotdata.schema.txt");
  if (!schema) throw std::runtime_error("cannot write " + (dir / "plotdata.schema.txt").string());
  for (const PlotTable& t : tables) {
    std::ofstream csv(dir / (t.name + ".csv"));
    if (!csv) throw std::runtime_error("cannot write " + (dir / (t.name + ".csv")).string());
    for (const std::string& line : t.comments) csv << "# " << line << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      csv << (i ? "," : "") << t.columns[i];
    csv << "\n";
    for (const std::vector<double>& row : t.rows) {
      if (row.size() != t.columns.size())
        throw std::invalid_argument("plot table row width mismatch in " + t.name);
      for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << fmt(row[i]);
      csv << "\n";
    }
    schema << t.name << ".csv: " << t.description << "; columns: ";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      schema << (i ? ", " : "") << t.columns[i];
    schema << "\n";
  }
}

}  // namespace cyclegas
