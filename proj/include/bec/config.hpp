#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bec/noise.hpp"
#include "bec/potentials.hpp"
#include "bec/propagator.hpp"

namespace bec {

/// Flat key=value configuration. Sources are layered as
///   defaults < config file < BECSIM_<KEY> environment variables < --set
/// and every key must be one of known_keys().
class ConfigMap {
public:
  static const std::vector<std::string>& known_keys();
  static std::string env_name(const std::string& key);  // "hold_time" -> "BECSIM_HOLD_TIME"

  void set(const std::string& key, const std::string& value);
  /// Parses "key=value" (used by --set).
  void set_assignment(const std::string& assignment);
  void load_file(const std::filesystem::path& path);
  void load_environment();

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_double(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_list(const std::string& key) const;

private:
  std::map<std::string, std::string> values_;
};

struct RunConfig {
  std::size_t n_points = 1024;
  double half_width = 20.0;
  TrapProtocol protocol;
  std::optional<double> g_direct;
  std::optional<PhysicalParams> physical;
  StepperConfig stepper;
  std::size_t parallel_threshold = 512;
  double obs_stride = 0.1;      // time between observations; 0 disables series output
  double snapshot_every = 0.0;  // time between density snapshots; 0 disables
  std::vector<double> snapshot_times;
  NoiseSpec noise;
  std::size_t n_realizations = 32;
  std::vector<double> thetas;   // scans, radians
  std::filesystem::path output_dir = "out";
  std::filesystem::path state_cache;  // empty: no cache
  // stationary / bdg / two-mode subcommands
  double separation = 0.0;
  std::string parity = "both";
  std::vector<double> bdg_separations;
  std::size_t bdg_modes = 8;
  double bdg_window = 10.0;
  bool bdg_critical = false;
  double bdg_d_min = 0.0;
  double bdg_d_max = 4.0;
  double bdg_tol = 1e-3;
  std::size_t two_mode_points = 64;
  double two_mode_dt = 1e-3;
  // limits
  double n_atoms_limits = 1e4;
  double trap_ratio_limits = 10.0;

  double coupling() const;
  void validate() const;
  /// Resolved key=value lines in key order; the basis of config_hash.
  std::string canonical() const;
  std::uint64_t config_hash() const;
};

/// Builds a validated RunConfig; throws ConfigError on unknown keys,
/// malformed values or inconsistent combinations (g together with the
/// physical parameters, for instance).
RunConfig make_run_config(const ConfigMap& map);

std::uint64_t fnv1a(const std::string& text) noexcept;

}  // namespace bec
