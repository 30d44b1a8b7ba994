#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bec/config.hpp"
#include "bec/driver.hpp"

namespace bec {

using Json = nlohmann::ordered_json;

/// Deterministic JSON text: two-space indent, keys in insertion order,
/// numbers as %.17g, non-finite numbers as null.
std::string dump_json(const Json& j);

void write_text(const std::filesystem::path& path, const std::string& text);

/// A CSV table; doubles go through format_double.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row();
  CsvTable& operator<<(double v);
  CsvTable& operator<<(const std::string& s);
  void write(const std::filesystem::path& path) const;
  std::string str() const;

private:
  std::size_t columns_;
  std::string text_;
  std::size_t filled_ = 0;
};

const char* version_string();

/// Config echo, config hash, seed, grid, step and version.
Json provenance(const RunConfig& cfg);

Json to_json(const RunResult& r);

// Each emitter creates `dir`, writes summary.json and, unless the
// observation stride is zero, the CSV tables of that subcommand.
void emit_run(const RunConfig& cfg, const Setup& setup, const RunResult& r,
              const std::filesystem::path& dir);
void emit_scan(const RunConfig& cfg, const std::vector<ScanRow>& rows,
               const std::filesystem::path& dir);
void emit_ensemble(const RunConfig& cfg, const std::vector<EnsembleRun>& runs,
                   const std::filesystem::path& dir);
void emit_two_mode(const RunConfig& cfg, const TwoModeRun& run, const std::filesystem::path& dir);

struct BdgEntry {
  double separation = 0.0;
  Parity parity = Parity::even;
  double mu = 0.0;
  BdgSpectrum spectrum;
};

void emit_bdg(const RunConfig& cfg, const std::vector<BdgEntry>& entries,
              const std::optional<CriticalSeparation>& critical, const std::filesystem::path& dir);
void emit_ground_state(const RunConfig& cfg, const std::vector<StationaryState>& states,
                       const std::filesystem::path& dir);
void emit_limits(const RunConfig& cfg, const CoherenceLimits& limits,
                 const std::filesystem::path& dir);

}  // namespace bec
