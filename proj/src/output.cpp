#include "bec/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "bec/errors.hpp"
#include "bec/format.hpp"

#ifndef BECSIM_VERSION
#define BECSIM_VERSION "unknown"
#endif

namespace bec {

namespace {

void dump(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        dump(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("output: cannot create " + dir.string() + ": " + ec.message());
}

bool tables_enabled(const RunConfig& cfg) { return cfg.obs_stride > 0.0; }

void write_series(const std::filesystem::path& path, const std::vector<const TimeSeries*>& cols) {
  std::vector<std::string> header{"t"};
  for (const auto* s : cols) header.push_back(s->label);
  CsvTable table(header);
  const TimeSeries& first = *cols.front();
  for (std::size_t i = 0; i < first.size(); ++i) {
    table.row() << first.times[i];
    for (const auto* s : cols) table << s->values[i];
  }
  table.write(path);
}

Json mode_json(const BdgMode& m) {
  Json j;
  j["re"] = m.frequency.real();
  j["im"] = m.frequency.imag();
  j["norm_sign"] = m.norm_sign;
  j["parity"] = to_string(m.parity);
  j["goldstone"] = m.goldstone;
  j["residual"] = m.residual;
  return j;
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, out, 0);
  out += '\n';
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("output: cannot open " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("output: write failed for " + path.string());
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  filled_ = columns_;
}

CsvTable& CsvTable::row() {
  if (filled_ != columns_) throw Error("csv: incomplete row");
  text_ += '\n';
  filled_ = 0;
  return *this;
}

CsvTable& CsvTable::operator<<(double v) {
  return *this << (std::isfinite(v) ? format_double(v) : std::string("nan"));
}

CsvTable& CsvTable::operator<<(const std::string& s) {
  if (filled_ >= columns_) throw Error("csv: too many columns");
  if (filled_) text_ += ',';
  if (s.find_first_of(",\"\n") != std::string::npos) {
    text_ += '"';
    for (const char c : s) text_ += c == '"' ? std::string("\"\"") : std::string(1, c);
    text_ += '"';
  } else {
    text_ += s;
  }
  ++filled_;
  return *this;
}

std::string CsvTable::str() const { return text_ + '\n'; }

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

const char* version_string() { return BECSIM_VERSION; }

Json provenance(const RunConfig& cfg) {
  Json j;
  j["version"] = version_string();
  j["config_hash"] = hex64(cfg.config_hash());
  j["seed"] = cfg.noise.seed;
  j["grid"] = {{"n_points", cfg.n_points},
               {"half_width", cfg.half_width},
               {"dx", 2.0 * cfg.half_width / static_cast<double>(cfg.n_points)}};
  j["dt"] = cfg.stepper.dt;
  j["g"] = cfg.coupling();
  j["noise_convention"] =
      "<V(x,t)V(x',t')> = 2 gamma delta(t-t') l^2/((x-x')^2 + l^2), resampled every step";
  Json echo = Json::object();
  std::istringstream lines(cfg.canonical());
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    echo[line.substr(0, eq)] = line.substr(eq + 1);
  }
  j["config"] = echo;
  return j;
}

Json to_json(const RunResult& r) {
  Json j;
  j["theta"] = r.theta;
  j["theta_over_pi"] = r.theta / M_PI;
  j["p0"] = r.populations.p0;
  j["p1"] = r.populations.p1;
  j["pex"] = r.populations.pex;
  j["dipole_amplitude"] = optional_number(r.dipole_amplitude);
  j["dipole_frequency"] = optional_number(r.dipole_frequency);
  j["soliton_found"] = r.soliton_found;
  j["soliton_lost_at"] = optional_number(r.soliton.lost_at);
  j["soliton_amplitude"] = optional_number(r.soliton_amplitude);
  j["soliton_period"] = optional_number(r.soliton_period);
  j["max_norm_drift"] = r.max_norm_drift;
  j["energy_drift_rate"] = optional_number(r.energy_drift_rate);
  j["steps"] = r.steps;
  return j;
}

void emit_run(const RunConfig& cfg, const Setup& setup, const RunResult& r,
              const std::filesystem::path& dir) {
  make_dir(dir);
  Json j;
  j["command"] = "run";
  j["provenance"] = provenance(cfg);
  j["mu0"] = setup.phi0.chemical_potential;
  j["mu1"] = setup.phi1.chemical_potential;
  j["result"] = to_json(r);
  write_text(dir / "summary.json", dump_json(j));
  if (!tables_enabled(cfg)) return;

  write_series(dir / "meanx.csv", {&r.mean_x, &r.width});
  write_series(dir / "soliton.csv", {&r.soliton.series, &r.soliton.depth});
  write_series(dir / "populations.csv", {&r.p0, &r.p1, &r.pex});
  const auto x = setup.grid->x();
  for (const Snapshot& s : r.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "density_t%.3f.csv", s.time);
    CsvTable table({"x", "density"});
    for (std::size_t i = 0; i < x.size(); ++i) table.row() << x[i] << s.density[i];
    table.write(dir / name);
  }
}

void emit_scan(const RunConfig& cfg, const std::vector<ScanRow>& rows,
               const std::filesystem::path& dir) {
  make_dir(dir);
  Json j;
  j["command"] = "scan-phase";
  j["provenance"] = provenance(cfg);
  Json list = Json::array();
  for (const ScanRow& row : rows) {
    Json e = row.result ? to_json(*row.result) : Json{{"theta", row.theta}};
    e["error"] = row.error.empty() ? Json(nullptr) : Json(row.error);
    list.push_back(e);
  }
  j["rows"] = list;
  write_text(dir / "summary.json", dump_json(j));
  if (!tables_enabled(cfg)) return;

  CsvTable table({"theta", "theta_over_pi", "p0", "p1", "pex", "dipole_amplitude",
                  "soliton_found", "soliton_amplitude", "error"});
  const double nan = std::nan("");
  for (const ScanRow& row : rows) {
    table.row() << row.theta << row.theta / M_PI;
    if (row.result) {
      const RunResult& r = *row.result;
      table << r.populations.p0 << r.populations.p1 << r.populations.pex
            << r.dipole_amplitude.value_or(nan) << std::string(r.soliton_found ? "1" : "0")
            << r.soliton_amplitude.value_or(nan);
    } else {
      table << nan << nan << nan << nan << std::string("0") << nan;
    }
    table << row.error;
  }
  table.write(dir / "scan.csv");
}

void emit_ensemble(const RunConfig& cfg, const std::vector<EnsembleRun>& runs,
                   const std::filesystem::path& dir) {
  make_dir(dir);
  Json j;
  j["command"] = "ensemble";
  j["provenance"] = provenance(cfg);
  j["gamma"] = cfg.noise.gamma;
  j["corr_length"] = cfg.noise.corr_length;
  Json list = Json::array();
  for (const EnsembleRun& run : runs) {
    const EnsembleResult& s = run.summary;
    list.push_back({{"theta", s.theta},
                    {"theta_over_pi", s.theta / M_PI},
                    {"n_realizations", s.n_realizations},
                    {"mean_p0", s.mean_p0},
                    {"stderr_p0", s.stderr_p0},
                    {"mean_p1", s.mean_p1},
                    {"stderr_p1", s.stderr_p1},
                    {"mean_pex", s.mean_pex},
                    {"stderr_pex", s.stderr_pex}});
  }
  j["results"] = list;
  write_text(dir / "summary.json", dump_json(j));
  if (!tables_enabled(cfg)) return;

  CsvTable table({"theta", "gamma", "n", "mean_p0", "stderr_p0", "mean_p1", "stderr_p1",
                  "mean_pex", "stderr_pex"});
  for (const EnsembleRun& run : runs) {
    const EnsembleResult& s = run.summary;
    table.row() << s.theta << cfg.noise.gamma << static_cast<double>(s.n_realizations)
                << s.mean_p0 << s.stderr_p0 << s.mean_p1 << s.stderr_p1 << s.mean_pex
                << s.stderr_pex;
  }
  table.write(dir / "ensemble.csv");

  CsvTable each({"theta", "realization", "p0", "p1", "pex"});
  for (const EnsembleRun& run : runs)
    for (std::size_t i = 0; i < run.realizations.size(); ++i) {
      const Populations& p = run.realizations[i];
      each.row() << run.summary.theta << static_cast<double>(i) << p.p0 << p.p1 << p.pex;
    }
  each.write(dir / "realizations.csv");
}

void emit_two_mode(const RunConfig& cfg, const TwoModeRun& run, const std::filesystem::path& dir) {
  make_dir(dir);
  auto mode = [](const ModeData& m) {
    return Json{{"d", m.separation}, {"mu0", m.mu0}, {"mu1", m.mu1},
                {"o00", m.o00},      {"o01", m.o01}, {"o11", m.o11}};
  };
  Json j;
  j["command"] = "two-mode";
  j["provenance"] = provenance(cfg);
  j["mode_data_d0"] = mode(run.at_zero);
  j["mode_data_dmax"] = mode(run.at_max);
  j["theta"] = cfg.protocol.theta;
  j["p0"] = std::norm(run.single.final_state.c0);
  j["p1"] = std::norm(run.single.final_state.c1);
  j["relative_phase"] = run.single.final_state.relative_phase();
  j["max_norm_drift"] = run.single.max_norm_drift;
  Json rows = Json::array();
  for (const auto& r : run.rows)
    rows.push_back({{"theta", r.theta}, {"theta_over_pi", r.theta / M_PI}, {"p0", r.p0}, {"p1", r.p1}});
  j["scan"] = rows;
  write_text(dir / "summary.json", dump_json(j));
  if (!tables_enabled(cfg)) return;

  write_series(dir / "two_mode.csv", {&run.single.p0, &run.single.p1});
  if (!run.rows.empty()) {
    CsvTable table({"theta", "theta_over_pi", "p0", "p1"});
    for (const auto& r : run.rows) table.row() << r.theta << r.theta / M_PI << r.p0 << r.p1;
    table.write(dir / "two_mode_scan.csv");
  }
}

void emit_bdg(const RunConfig& cfg, const std::vector<BdgEntry>& entries,
              const std::optional<CriticalSeparation>& critical, const std::filesystem::path& dir) {
  make_dir(dir);
  Json j;
  j["command"] = "bdg-scan";
  j["provenance"] = provenance(cfg);
  Json list = Json::array();
  for (const BdgEntry& e : entries) {
    Json modes = Json::array();
    for (const BdgMode& m : e.spectrum.modes) modes.push_back(mode_json(m));
    list.push_back({{"d", e.separation},
                    {"state_parity", to_string(e.parity)},
                    {"mu", e.mu},
                    {"max_growth_rate", e.spectrum.max_growth_rate()},
                    {"max_pair_defect", e.spectrum.max_pair_defect},
                    {"refinement_change", optional_number(e.spectrum.refinement_change)},
                    {"discretization_sensitive", e.spectrum.discretization_sensitive},
                    {"modes", modes}});
  }
  j["spectra"] = list;
  if (critical) {
    Json scan = Json::array();
    for (const auto& [d, rate] : critical->scan) scan.push_back({{"d", d}, {"max_im_omega", rate}});
    j["critical_separation"] = {{"d_crit", critical->d_crit}, {"scan", scan}};
  }
  write_text(dir / "summary.json", dump_json(j));
  if (!tables_enabled(cfg)) return;

  CsvTable table({"g", "d", "state_parity", "index", "re_omega", "im_omega", "norm_sign",
                  "mode_parity", "goldstone", "residual"});
  for (const BdgEntry& e : entries)
    for (std::size_t i = 0; i < e.spectrum.modes.size(); ++i) {
      const BdgMode& m = e.spectrum.modes[i];
      table.row() << cfg.coupling() << e.separation << std::string(to_string(e.parity))
                  << static_cast<double>(i) << m.frequency.real() << m.frequency.imag()
                  << static_cast<double>(m.norm_sign) << std::string(to_string(m.parity))
                  << std::string(m.goldstone ? "1" : "0") << m.residual;
    }
  table.write(dir / "bdg.csv");
}

void emit_ground_state(const RunConfig& cfg, const std::vector<StationaryState>& states,
                       const std::filesystem::path& dir) {
  make_dir(dir);
  Json j;
  j["command"] = "ground-state";
  j["provenance"] = provenance(cfg);
  Json list = Json::array();
  for (const StationaryState& s : states)
    list.push_back({{"parity", to_string(s.parity)},
                    {"d", s.separation},
                    {"mu", s.chemical_potential},
                    {"mu_norm_decay", s.mu_norm_decay},
                    {"residual", s.residual}});
  j["states"] = list;
  write_text(dir / "summary.json", dump_json(j));
  if (!tables_enabled(cfg)) return;
  for (const StationaryState& s : states)
    write_field_csv(s.wavefunction, dir / (std::string("state_") + to_string(s.parity) + ".csv"));
}

void emit_limits(const RunConfig& cfg, const CoherenceLimits& limits,
                 const std::filesystem::path& dir) {
  make_dir(dir);
  Json j;
  j["command"] = "limits";
  j["provenance"] = provenance(cfg);
  j["n_atoms"] = cfg.n_atoms_limits;
  j["trap_ratio"] = cfg.trap_ratio_limits;
  j["tau"] = cfg.protocol.tau;
  j["t_phi"] = limits.t_phi;
  j["tau_diff"] = limits.tau_diff;
  j["tau_within_tau_diff"] = limits.tau_within;
  write_text(dir / "summary.json", dump_json(j));
}

}  // namespace bec
