#include "bec/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bec/errors.hpp"
#include "bec/format.hpp"

namespace bec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  return v;
}

}  // namespace

const std::vector<std::string>& ConfigMap::known_keys() {
  static const std::vector<std::string> keys = {
      "a", "bdg_critical", "bdg_d_max", "bdg_d_min", "bdg_modes", "bdg_separations",
      "bdg_tol", "bdg_window", "corr_length", "d", "dt", "g", "gamma", "half_width",
      "hold_time", "kernels", "n_atoms", "n_points", "n_realizations", "obs_stride",
      "output_dir", "parallel_threshold", "parity", "scattering_length_ratio", "seed",
      "snapshot_every", "snapshot_times", "state_cache", "tau", "theta_count",
      "theta_from_over_pi", "theta_over_pi", "theta_to_over_pi", "thetas_over_pi",
      "transverse_ratio", "trap_ratio", "two_mode_dt", "two_mode_points"};
  return keys;
}

std::string ConfigMap::env_name(const std::string& key) {
  std::string out = "BECSIM_";
  for (const char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw ConfigError("config: unknown key '" + key + "'");
  values_[key] = trim(value);
}

void ConfigMap::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("config: expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void ConfigMap::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot read " + path.string());
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos)
      throw ConfigError("config: " + path.string() + ":" + std::to_string(number) +
                        ": expected key = value");
    try {
      set_assignment(line);
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void ConfigMap::load_environment() {
  for (const auto& key : known_keys())
    if (const char* v = std::getenv(env_name(key).c_str())) set(key, v);
}

std::optional<std::string> ConfigMap::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ConfigMap::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_double(key, *v);
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  return get_double(key).value_or(fallback);
}

long long ConfigMap::get_int(const std::string& key, long long fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  char* end = nullptr;
  const long long out = std::strtoll(v->c_str(), &end, 10);
  if (v->empty() || end != v->c_str() + v->size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + *v + "'");
  return out;
}

std::uint64_t ConfigMap::get_uint64(const std::string& key, std::uint64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  char* end = nullptr;
  const unsigned long long out = std::strtoull(v->c_str(), &end, 0);
  if (v->empty() || (*v)[0] == '-' || end != v->c_str() + v->size())
    throw ConfigError("config: '" + key + "' expects an unsigned integer, got '" + *v + "'");
  return out;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
  if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
  throw ConfigError("config: '" + key + "' expects a boolean, got '" + *v + "'");
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::vector<double> ConfigMap::get_list(const std::string& key) const {
  std::vector<double> out;
  const auto v = get(key);
  if (!v || v->empty()) return out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

double RunConfig::coupling() const {
  if (g_direct) return *g_direct;
  if (physical) return effective_g(*physical);
  return 0.0;
}

void RunConfig::validate() const {
  make_grid(n_points, half_width);
  protocol.validate();
  stepper.validate();
  noise.validate();
  if (g_direct && physical) throw ConfigError("config: give either g or the physical parameters, not both");
  if (g_direct && !(*g_direct >= 0.0)) throw ConfigError("config: g must be >= 0");
  if (physical) physical->validate();
  if (!(obs_stride >= 0.0)) throw ConfigError("config: obs_stride must be >= 0");
  if (!(snapshot_every >= 0.0)) throw ConfigError("config: snapshot_every must be >= 0");
  if (n_realizations < 2) throw ConfigError("config: n_realizations must be >= 2");
  if (parity != "even" && parity != "odd" && parity != "both")
    throw ConfigError("config: parity must be even, odd or both");
  if (!(bdg_window > 0.0)) throw ConfigError("config: bdg_window must be > 0");
  if (!(bdg_tol > 0.0)) throw ConfigError("config: bdg_tol must be > 0");
  if (!(bdg_d_max > bdg_d_min)) throw ConfigError("config: bdg_d_max must exceed bdg_d_min");
  if (two_mode_points < 4) throw ConfigError("config: two_mode_points must be >= 4");
  if (!(two_mode_dt > 0.0)) throw ConfigError("config: two_mode_dt must be > 0");
  if (!(n_atoms_limits >= 1.0)) throw ConfigError("config: n_atoms must be >= 1");
  for (const double t : thetas)
    if (!(t >= 0.0 && t < 2.0 * M_PI)) throw ConfigError("config: scan phases must lie in [0, 2 pi)");
  // The stride must be a whole number of steps; so must snapshot spacing.
  if (obs_stride > 0.0) whole_steps(obs_stride, stepper.dt, "observation stride");
  if (snapshot_every > 0.0) whole_steps(snapshot_every, stepper.dt, "snapshot spacing");
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  auto line = [&](const char* k, const std::string& v) { out << k << '=' << v << '\n'; };
  auto num = [&](const char* k, double v) { line(k, format_double(v)); };
  auto list = [&](const char* k, const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    line(k, s);
  };
  num("a", protocol.a);
  num("dt", stepper.dt);
  if (g_direct) num("g", *g_direct);
  num("gamma", noise.gamma);
  num("corr_length", noise.corr_length);
  num("half_width", half_width);
  num("hold_time", protocol.hold_time);
  line("n_points", std::to_string(n_points));
  line("n_realizations", std::to_string(n_realizations));
  if (physical) {
    num("n_atoms", physical->n_atoms);
    num("scattering_length_ratio", physical->scattering_length_ratio);
    num("trap_ratio", physical->trap_ratio);
    num("transverse_ratio", physical->transverse_ratio);
  }
  num("obs_stride", obs_stride);
  line("seed", std::to_string(noise.seed));
  num("snapshot_every", snapshot_every);
  list("snapshot_times", snapshot_times);
  num("tau", protocol.tau);
  num("theta", protocol.theta);
  list("thetas", thetas);
  num("d", separation);
  line("parity", parity);
  list("bdg_separations", bdg_separations);
  line("bdg_modes", std::to_string(bdg_modes));
  num("bdg_window", bdg_window);
  line("bdg_critical", bdg_critical ? "true" : "false");
  num("bdg_d_min", bdg_d_min);
  num("bdg_d_max", bdg_d_max);
  num("bdg_tol", bdg_tol);
  line("two_mode_points", std::to_string(two_mode_points));
  num("two_mode_dt", two_mode_dt);
  num("limits_n_atoms", n_atoms_limits);
  num("limits_trap_ratio", trap_ratio_limits);
  return out.str();
}

std::uint64_t fnv1a(const std::string& text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t RunConfig::config_hash() const { return fnv1a(canonical()); }

RunConfig make_run_config(const ConfigMap& m) {
  RunConfig c;
  const long long n = m.get_int("n_points", 1024);
  if (n < 0) throw ConfigError("config: n_points must be positive");
  c.n_points = static_cast<std::size_t>(n);
  c.half_width = m.get_double("half_width", 20.0);
  c.protocol.a = m.get_double("a", 2.0);
  c.protocol.tau = m.get_double("tau", 70.0);
  c.protocol.theta = M_PI * m.get_double("theta_over_pi", 0.0);
  c.protocol.hold_time = m.get_double("hold_time", 30.0);

  c.g_direct = m.get_double("g");
  const bool physical = m.has("scattering_length_ratio") || m.has("transverse_ratio");
  if (physical) {
    if (c.g_direct) throw ConfigError("config: give either g or the physical parameters, not both");
    PhysicalParams p;
    p.n_atoms = m.get_double("n_atoms", 0.0);
    p.scattering_length_ratio = m.get_double("scattering_length_ratio", 0.0);
    p.trap_ratio = m.get_double("trap_ratio", 0.0);
    p.transverse_ratio = m.get_double("transverse_ratio", 0.0);
    c.physical = p;
  }
  if (!c.g_direct && !c.physical) c.g_direct = 0.0;
  c.n_atoms_limits = m.get_double("n_atoms", 1e4);
  c.trap_ratio_limits = m.get_double("trap_ratio", 10.0);

  c.stepper.dt = m.get_double("dt", 1e-3);
  const std::string kernels = m.get_string("kernels", "parallel");
  if (kernels == "parallel")
    c.stepper.backend = kernels::Backend::parallel;
  else if (kernels == "serial")
    c.stepper.backend = kernels::Backend::serial;
  else
    throw ConfigError("config: kernels must be serial or parallel");
  const long long threshold = m.get_int("parallel_threshold", 512);
  if (threshold < 0) throw ConfigError("config: parallel_threshold must be >= 0");
  c.parallel_threshold = static_cast<std::size_t>(threshold);

  c.obs_stride = m.get_double("obs_stride", 0.1);
  c.snapshot_every = m.get_double("snapshot_every", 0.0);
  c.snapshot_times = m.get_list("snapshot_times");

  c.noise.gamma = m.get_double("gamma", 0.0);
  c.noise.corr_length = m.get_double("corr_length", 0.5);
  c.noise.seed = m.get_uint64("seed", 1);
  const long long reps = m.get_int("n_realizations", 32);
  if (reps < 0) throw ConfigError("config: n_realizations must be positive");
  c.n_realizations = static_cast<std::size_t>(reps);

  for (const double t : m.get_list("thetas_over_pi")) c.thetas.push_back(M_PI * t);
  if (m.has("theta_count")) {
    if (!c.thetas.empty()) throw ConfigError("config: give thetas_over_pi or a theta range, not both");
    const long long count = m.get_int("theta_count", 0);
    const double from = m.get_double("theta_from_over_pi", 0.0);
    const double to = m.get_double("theta_to_over_pi", 1.0);
    if (count < 2) throw ConfigError("config: theta_count must be >= 2");
    for (long long i = 0; i < count; ++i)
      c.thetas.push_back(M_PI * (from + (to - from) * static_cast<double>(i) /
                                           static_cast<double>(count - 1)));
  }

  c.output_dir = m.get_string("output_dir", "out");
  c.state_cache = m.get_string("state_cache", "");
  c.separation = m.get_double("d", 0.0);
  c.parity = m.get_string("parity", "both");
  c.bdg_separations = m.get_list("bdg_separations");
  const long long modes = m.get_int("bdg_modes", 8);
  if (modes < 1) throw ConfigError("config: bdg_modes must be >= 1");
  c.bdg_modes = static_cast<std::size_t>(modes);
  c.bdg_window = m.get_double("bdg_window", 10.0);
  c.bdg_critical = m.get_bool("bdg_critical", false);
  c.bdg_d_min = m.get_double("bdg_d_min", 0.0);
  c.bdg_d_max = m.get_double("bdg_d_max", 4.0);
  c.bdg_tol = m.get_double("bdg_tol", 1e-3);
  const long long points = m.get_int("two_mode_points", 64);
  if (points < 0) throw ConfigError("config: two_mode_points must be positive");
  c.two_mode_points = static_cast<std::size_t>(points);
  c.two_mode_dt = m.get_double("two_mode_dt", 1e-3);
  c.validate();
  return c;
}

}  // namespace bec
