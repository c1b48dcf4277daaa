#include "qkdv/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qkdv/error.hpp"

namespace qkdv {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last) throw UsageError("config key '" + key + "': not a number: '" + text + "'");
  return v;
}

}  // namespace

Config Config::parse(std::string_view text, std::string_view origin) {
  Config c;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw UsageError(std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
    c.values_[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

long Config::get_int(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  long v = 0;
  const std::string& s = it->second;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw UsageError("config key '" + key + "': not an integer");
  return v;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::uint64_t v = 0;
  const std::string& s = it->second;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw UsageError("config key '" + key + "': not a non-negative integer");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw UsageError("config key '" + key + "': expected a boolean");
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::string_view rest = it->second;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string item = trim(rest.substr(0, comma));
    if (!item.empty()) out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (out.empty()) throw UsageError("config key '" + key + "': empty list");
  return out;
}

void Config::require_known(const std::set<std::string>& known, const std::vector<std::string>& prefixes) const {
  for (const auto& [k, v] : values_) {
    if (known.count(k)) continue;
    bool ok = false;
    for (const auto& p : prefixes) ok = ok || k.rfind(p, 0) == 0;
    if (!ok) throw UsageError("unknown config key '" + k + "'");
  }
}

std::string Config::canonical() const {
  std::string s;
  for (const auto& [k, v] : values_) s += k + " = " + v + "\n";
  return s;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentConfig::config_hash() const {
  Config c = source;
  c.set("subcommand", subcommand);
  c.set("seed", std::to_string(seed));
  // Neither changes the numbers.
  Config filtered;
  for (const auto& [k, v] : c.values())
    if (k != "jobs" && k != "out") filtered.set(k, v);
  return hash_hex(fnv1a(filtered.canonical()));
}

ExperimentConfig experiment_from(const Config& cfg, const std::string& subcommand) {
  ExperimentConfig e;
  e.subcommand = subcommand;
  e.source = cfg;
  e.problem = cfg.get_string("problem", e.problem);
  for (const auto& [k, v] : cfg.values())
    if (k.rfind("param.", 0) == 0) e.params[k.substr(6)] = cfg.get_double(k, 0.0);
  e.grid.half_length = cfg.get_double("grid.half_length", e.grid.half_length);
  const long n = cfg.get_int("grid.n_points", static_cast<long>(e.grid.n_points));
  if (n <= 0) throw UsageError("grid.n_points must be positive");
  e.grid.n_points = static_cast<std::size_t>(n);
  e.solve.eps = cfg.get_double("eps", e.solve.eps);
  e.solve.t_final = cfg.get_double("t_final", e.solve.t_final);
  e.solve.dt = cfg.get_double("dt", e.solve.dt);
  const long samples = cfg.get_int("samples", static_cast<long>(e.solve.samples));
  if (samples < 2) throw UsageError("samples must be at least 2");
  e.solve.samples = static_cast<std::size_t>(samples);
  const std::string integ = cfg.get_string("integrator", "integrating_factor");
  if (integ == "integrating_factor") e.solve.integrator = Integrator::integrating_factor;
  else if (integ == "imex") e.solve.integrator = Integrator::imex;
  else throw UsageError("integrator must be integrating_factor or imex");
  e.eps_list = cfg.get_list("eps_list", {});
  e.kappa_list = cfg.get_list("kappa_list", {});
  e.cutoffs = cfg.get_list("cutoffs", {});
  e.xis = cfg.get_list("xis", {});
  e.out_dir = cfg.get_string("out", ".");
  e.seed = cfg.get_u64("seed", e.seed);
  const long jobs = cfg.get_int("jobs", 1);
  if (jobs < 1) throw UsageError("jobs must be at least 1");
  e.jobs = static_cast<std::size_t>(jobs);
  return e;
}

}  // namespace qkdv
