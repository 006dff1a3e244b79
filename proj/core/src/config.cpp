#include "cyclegas/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cyclegas {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  double x = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad number for " + key + ": " + value);
  return x;
}

long long parse_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  long long x = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad integer for " + key + ": " + value);
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  unsigned long long x = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || value.find('-') != std::string::npos)
    throw std::invalid_argument("config: bad count for " + key + ": " + value);
  return static_cast<std::uint64_t>(x);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: bad bool for " + key + ": " + value);
}

Site parse_site_opt(const std::string& key, const std::string& value, int dimension) {
  if (value == "none" || value.empty()) return Site{};
  try {
    return parse_site(value, dimension);
  } catch (const std::exception& e) {
    throw std::invalid_argument("config: bad site for " + key + ": " + e.what());
  }
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value, Parse parse) {
  std::vector<T> out;
  if (value == "none" || value.empty()) return out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse(key, trim(item)));
  return out;
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_site(const Site& s) { return s.empty() ? "none" : format_site(s); }

template <typename T, typename Fmt>
std::string fmt_list(const std::vector<T>& xs, Fmt fmt) {
  if (xs.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt(xs[i]);
  }
  return out;
}

std::uint64_t fnv64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "dimension") cfg.dimension = static_cast<int>(parse_int(key, value));
  else if (key == "potential") cfg.potential = value;
  else if (key == "scale") cfg.scale = parse_double(key, value);
  else if (key == "exponent") cfg.exponent = static_cast<int>(parse_int(key, value));
  else if (key == "table") cfg.table_path = value == "none" ? "" : value;
  else if (key == "alpha") cfg.alpha = parse_double(key, value);
  else if (key == "alpha_min") cfg.alpha_min = parse_double(key, value);
  else if (key == "alpha_max") cfg.alpha_max = parse_double(key, value);
  else if (key == "alpha_steps") cfg.alpha_steps = static_cast<int>(parse_int(key, value));
  else if (key == "shift") cfg.shift = parse_site_opt(key, value, cfg.dimension);
  else if (key == "window.lo") cfg.window_lo = parse_site_opt(key, value, cfg.dimension);
  else if (key == "window.hi") cfg.window_hi = parse_site_opt(key, value, cfg.dimension);
  else if (key == "lambda.lo") cfg.lambda_lo = parse_site_opt(key, value, cfg.dimension);
  else if (key == "lambda.hi") cfg.lambda_hi = parse_site_opt(key, value, cfg.dimension);
  else if (key == "lambda.radii")
    cfg.radii = parse_list<int>(key, value, [](const std::string& k, const std::string& v) {
      return static_cast<int>(parse_int(k, v));
    });
  else if (key == "t_backs")
    cfg.t_backs = parse_list<double>(key, value, parse_double);
  else if (key == "cutoffs.max_length")
    cfg.cutoffs.max_length = static_cast<int>(parse_int(key, value));
  else if (key == "cutoffs.max_jump") cfg.cutoffs.max_jump = parse_double(key, value);
  else if (key == "cutoffs.min_weight") cfg.cutoffs.min_weight = parse_double(key, value);
  else if (key == "replicas") cfg.replicas = parse_u64(key, value);
  else if (key == "seed") cfg.seed = parse_u64(key, value);
  else if (key == "allow_uncertified") cfg.allow_uncertified = parse_bool(key, value);
  else if (key == "max_clan_nodes") cfg.max_clan_nodes = parse_u64(key, value);
  else if (key == "threads") cfg.threads = static_cast<int>(parse_int(key, value));
  else if (key == "compare_oracle") cfg.compare_oracle = parse_bool(key, value);
  else if (key == "out") cfg.out = value == "none" ? "" : value;
  else throw std::invalid_argument("config: unknown key: " + key);
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " has no '='");
    apply_config_kv(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig read_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  return parse_config(in, std::move(base));
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "dimension = " << cfg.dimension << "\n";
  out << "potential = " << cfg.potential << "\n";
  out << "scale = " << fmt_double(cfg.scale) << "\n";
  out << "exponent = " << cfg.exponent << "\n";
  out << "table = " << (cfg.table_path.empty() ? "none" : cfg.table_path) << "\n";
  out << "alpha = " << fmt_double(cfg.alpha) << "\n";
  out << "alpha_min = " << fmt_double(cfg.alpha_min) << "\n";
  out << "alpha_max = " << fmt_double(cfg.alpha_max) << "\n";
  out << "alpha_steps = " << cfg.alpha_steps << "\n";
  out << "shift = " << fmt_site(cfg.shift) << "\n";
  out << "window.lo = " << fmt_site(cfg.window_lo) << "\n";
  out << "window.hi = " << fmt_site(cfg.window_hi) << "\n";
  out << "lambda.lo = " << fmt_site(cfg.lambda_lo) << "\n";
  out << "lambda.hi = " << fmt_site(cfg.lambda_hi) << "\n";
  out << "lambda.radii = "
      << fmt_list(cfg.radii, [](int r) { return std::to_string(r); }) << "\n";
  out << "t_backs = " << fmt_list(cfg.t_backs, fmt_double) << "\n";
  out << "cutoffs.max_length = " << cfg.cutoffs.max_length << "\n";
  out << "cutoffs.max_jump = " << fmt_double(cfg.cutoffs.max_jump) << "\n";
  out << "cutoffs.min_weight = " << fmt_double(cfg.cutoffs.min_weight) << "\n";
  out << "replicas = " << cfg.replicas << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "allow_uncertified = " << (cfg.allow_uncertified ? "true" : "false") << "\n";
  out << "max_clan_nodes = " << cfg.max_clan_nodes << "\n";
  out << "threads = " << cfg.threads << "\n";
  out << "compare_oracle = " << (cfg.compare_oracle ? "true" : "false") << "\n";
  out << "out = " << (cfg.out.empty() ? "none" : cfg.out) << "\n";
  return out.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  // Delivery details (output path, worker count, extra cross-checks) stay
  // out of the hash: reruns of one experiment must agree byte for byte no
  // matter where the files land or how many workers computed them.
  std::istringstream in(serialize_config(cfg));
  std::string line;
  std::string canon;
  while (std::getline(in, line)) {
    if (line.rfind("out = ", 0) == 0) continue;
    if (line.rfind("threads = ", 0) == 0) continue;
    if (line.rfind("compare_oracle = ", 0) == 0) continue;
    canon += line;
    canon += '\n';
  }
  return fnv64(canon);
}

void validate_config(const RunConfig& cfg) {
  if (cfg.dimension < 1) throw std::invalid_argument("config: dimension must be at least 1");
  if (cfg.potential != "gaussian" && cfg.potential != "nearest_neighbor" &&
      cfg.potential != "powerlaw" && cfg.potential != "table")
    throw std::invalid_argument("config: unknown potential: " + cfg.potential);
  if (cfg.potential == "table" && cfg.table_path.empty())
    throw std::invalid_argument("config: table potential needs table = <path>");
  if (cfg.scale <= 0.0) throw std::invalid_argument("config: scale must be positive");
  if (cfg.potential == "powerlaw" && cfg.exponent < 1)
    throw std::invalid_argument("config: exponent must be at least 1");
  if (cfg.alpha <= 0.0) throw std::invalid_argument("config: alpha must be positive");
  if (cfg.alpha_steps < 0) throw std::invalid_argument("config: alpha_steps must be nonnegative");
  if (cfg.alpha_steps > 0 && !(cfg.alpha_min > 0.0 && cfg.alpha_max >= cfg.alpha_min))
    throw std::invalid_argument("config: alpha grid needs 0 < alpha_min <= alpha_max");
  if (cfg.cutoffs.max_length < 2)
    throw std::invalid_argument("config: cutoffs.max_length must be at least 2");
  if (cfg.cutoffs.max_jump <= 0.0)
    throw std::invalid_argument("config: cutoffs.max_jump must be positive");
  if (cfg.cutoffs.min_weight < 0.0)
    throw std::invalid_argument("config: cutoffs.min_weight must be nonnegative");
  if (cfg.replicas == 0) throw std::invalid_argument("config: replicas must be positive");
  if (cfg.max_clan_nodes == 0) throw std::invalid_argument("config: max_clan_nodes must be positive");
  if (cfg.threads < 1) throw std::invalid_argument("config: threads must be at least 1");

  auto check_box = [&](const char* name, const Site& lo, const Site& hi) {
    if (lo.empty() != hi.empty())
      throw std::invalid_argument(std::string("config: ") + name + " needs both corners");
    if (lo.empty()) return;
    if (static_cast<int>(lo.size()) != cfg.dimension)
      throw std::invalid_argument(std::string("config: ") + name + " dimension mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (lo[i] > hi[i])
        throw std::invalid_argument(std::string("config: ") + name + " has lo > hi");
  };
  check_box("window", cfg.window_lo, cfg.window_hi);
  check_box("lambda", cfg.lambda_lo, cfg.lambda_hi);
  if (!cfg.shift.empty() && static_cast<int>(cfg.shift.size()) != cfg.dimension)
    throw std::invalid_argument("config: shift dimension mismatch");
  for (int r : cfg.radii)
    if (r < 0) throw std::invalid_argument("config: lambda.radii must be nonnegative");
  for (double t : cfg.t_backs)
    if (t <= 0.0) throw std::invalid_argument("config: t_backs must be positive");
}

Potential make_potential(const RunConfig& cfg) {
  Potential v;
  if (cfg.potential == "gaussian") v = gaussian_potential(cfg.dimension, cfg.scale);
  else if (cfg.potential == "nearest_neighbor") v = nearest_neighbor_potential(cfg.dimension);
  else if (cfg.potential == "powerlaw") v = power_law_potential(cfg.dimension, cfg.exponent);
  else if (cfg.potential == "table") v = load_table_potential(cfg.table_path, cfg.dimension);
  else throw std::invalid_argument("config: unknown potential: " + cfg.potential);
  if (!cfg.shift.empty() && !is_zero(cfg.shift)) v = shifted(v, cfg.shift);
  return v;
}

BoxRegion config_window(const RunConfig& cfg) {
  if (cfg.window_lo.empty()) throw std::invalid_argument("config: window corners are required");
  return BoxRegion::box(cfg.window_lo, cfg.window_hi);
}

BoxRegion config_lambda(const RunConfig& cfg) {
  if (cfg.lambda_lo.empty()) throw std::invalid_argument("config: lambda corners are required");
  return BoxRegion::box(cfg.lambda_lo, cfg.lambda_hi);
}

}  // namespace cyclegas
