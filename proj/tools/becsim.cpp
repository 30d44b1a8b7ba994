#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bec/config.hpp"
#include "bec/driver.hpp"
#include "bec/errors.hpp"
#include "bec/format.hpp"
#include "bec/kernels.hpp"
#include "bec/output.hpp"

namespace {

enum Exit { ok = 0, config = 2, numerical = 3, io = 4 };

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> sets;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_file, "key = value configuration file");
  cmd->add_option("--set", args.sets, "override a key (key=value), repeatable");
  cmd->add_option("--jobs", args.jobs, "parallel workers (default: available cores)")
      ->check(CLI::NonNegativeNumber);
}

bec::RunConfig load(const CommonArgs& args) {
  bec::ConfigMap map;
  if (!args.config_file.empty()) map.load_file(args.config_file);
  map.load_environment();
  for (const auto& s : args.sets) map.set_assignment(s);
  return bec::make_run_config(map);
}

std::vector<double> phases(const bec::RunConfig& cfg) {
  if (!cfg.thetas.empty()) return cfg.thetas;
  return {cfg.protocol.theta};
}

int cmd_run(const bec::RunConfig& cfg, int) {
  const bec::Setup setup = bec::prepare(cfg);
  std::optional<bec::NoiseField> noise;
  if (cfg.noise.gamma > 0.0)
    noise.emplace(setup.grid, cfg.noise, cfg.stepper.dt, bec::realization_seed(cfg.noise.seed, 0));
  const bec::RunResult r =
      bec::run_interferometer(cfg, setup, {noise ? &*noise : nullptr, true, true});
  bec::emit_run(cfg, setup, r, cfg.output_dir);
  std::printf("p0 %s  p1 %s  pex %s\n", bec::format_double(r.populations.p0).c_str(),
              bec::format_double(r.populations.p1).c_str(),
              bec::format_double(r.populations.pex).c_str());
  return ok;
}

int cmd_scan(const bec::RunConfig& cfg, int jobs) {
  const bec::Setup setup = bec::prepare(cfg);
  const auto rows = bec::scan_phase(cfg, setup, cfg.thetas, jobs);
  bec::emit_scan(cfg, rows, cfg.output_dir);
  int status = ok;
  for (const auto& row : rows)
    if (!row.error.empty()) {
      std::fprintf(stderr, "theta %s failed: %s\n", bec::format_double(row.theta).c_str(),
                   row.error.c_str());
      status = numerical;
    }
  return status;
}

int cmd_ensemble(const bec::RunConfig& cfg, int jobs) {
  const bec::Setup setup = bec::prepare(cfg);
  std::vector<double> thetas = phases(cfg);
  std::sort(thetas.begin(), thetas.end());
  std::vector<bec::EnsembleRun> runs;
  for (const double theta : thetas) runs.push_back(bec::run_ensemble(cfg, setup, theta, jobs));
  bec::emit_ensemble(cfg, runs, cfg.output_dir);
  for (const auto& r : runs)
    std::printf("theta/pi %s  <p0> %s +- %s\n", bec::format_double(r.summary.theta / M_PI).c_str(),
                bec::format_double(r.summary.mean_p0).c_str(),
                bec::format_double(r.summary.stderr_p0).c_str());
  return ok;
}

std::vector<bec::Parity> parities(const bec::RunConfig& cfg) {
  if (cfg.parity == "even") return {bec::Parity::even};
  if (cfg.parity == "odd") return {bec::Parity::odd};
  return {bec::Parity::even, bec::Parity::odd};
}

int cmd_bdg(const bec::RunConfig& cfg, int jobs) {
  const bec::GridPtr grid = bec::make_grid(cfg.n_points, cfg.half_width);
  const double g = cfg.coupling();
  std::vector<double> ds = cfg.bdg_separations;
  if (ds.empty()) ds.push_back(cfg.separation);
  std::sort(ds.begin(), ds.end());
  std::optional<bec::StateCache> cache;
  if (!cfg.state_cache.empty()) cache.emplace(cfg.state_cache);
  bec::BdgOptions opts;
  opts.window = cfg.bdg_window;
  opts.n_modes = cfg.bdg_modes;

  struct Job {
    double d;
    bec::Parity parity;
  };
  std::vector<Job> work;
  for (const double d : ds)
    for (const auto p : parities(cfg)) work.push_back({d, p});
  std::vector<std::optional<bec::BdgEntry>> entries(work.size());
  std::vector<std::exception_ptr> errors(work.size());
  const auto n = static_cast<long>(work.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      const auto state = bec::stationary_at(grid, work[k].d, g, work[k].parity, {},
                                            cache ? &*cache : nullptr);
      const auto field = bec::double_well_field(*grid, work[k].d);
      entries[k] = bec::BdgEntry{work[k].d, work[k].parity, state.chemical_potential,
                                 bec::bdg_spectrum(state, field, g, opts)};
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<bec::BdgEntry> list;
  for (auto& e : entries) list.push_back(std::move(*e));

  std::optional<bec::CriticalSeparation> critical;
  if (cfg.bdg_critical)
    critical = bec::critical_separation(grid, g, cfg.bdg_d_min, cfg.bdg_d_max, cfg.bdg_tol, opts);
  bec::emit_bdg(cfg, list, critical, cfg.output_dir);
  if (critical) std::printf("d_crit %s\n", bec::format_double(critical->d_crit).c_str());
  return ok;
}

int cmd_ground_state(const bec::RunConfig& cfg, int) {
  const bec::GridPtr grid = bec::make_grid(cfg.n_points, cfg.half_width);
  std::optional<bec::StateCache> cache;
  if (!cfg.state_cache.empty()) cache.emplace(cfg.state_cache);
  std::vector<bec::StationaryState> states;
  for (const auto p : parities(cfg)) {
    states.push_back(bec::stationary_at(grid, cfg.separation, cfg.coupling(), p, {},
                                        cache ? &*cache : nullptr));
    std::printf("%s  mu %s  residual %s\n", bec::to_string(p),
                bec::format_double(states.back().chemical_potential).c_str(),
                bec::format_double(states.back().residual).c_str());
  }
  bec::emit_ground_state(cfg, states, cfg.output_dir);
  return ok;
}

int cmd_two_mode(const bec::RunConfig& cfg, int jobs) {
  const auto run = bec::run_two_mode(cfg, cfg.thetas, jobs);
  bec::emit_two_mode(cfg, run, cfg.output_dir);
  std::printf("p0 %s  p1 %s\n", bec::format_double(std::norm(run.single.final_state.c0)).c_str(),
              bec::format_double(std::norm(run.single.final_state.c1)).c_str());
  return ok;
}

int cmd_limits(const bec::RunConfig& cfg, int) {
  const auto lim = bec::coherence_limits(cfg.n_atoms_limits, cfg.coupling(),
                                         cfg.trap_ratio_limits, cfg.protocol.tau);
  bec::emit_limits(cfg, lim, cfg.output_dir);
  std::printf("T_phi %s  tau_diff %s  tau < tau_diff: %s\n",
              bec::format_double(lim.t_phi).c_str(), bec::format_double(lim.tau_diff).c_str(),
              lim.tau_within ? "yes" : "no");
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split, imprint and recombine a 1D condensate in a double-well interferometer"};
  app.require_subcommand(1);

  using Handler = int (*)(const bec::RunConfig&, int);
  struct Command {
    const char* name;
    const char* help;
    Handler fn;
  };
  const Command commands[] = {
      {"run", "one interferometer run", cmd_run},
      {"scan-phase", "runs over a list of imprinted phases", cmd_scan},
      {"ensemble", "noise-averaged populations", cmd_ensemble},
      {"bdg-scan", "Bogoliubov spectra and the critical separation", cmd_bdg},
      {"ground-state", "stationary states of the double well", cmd_ground_state},
      {"two-mode", "two-mode model of the protocol", cmd_two_mode},
      {"limits", "phase-diffusion and coherence time estimates", cmd_limits},
  };
  CommonArgs args;
  std::vector<std::pair<CLI::App*, Handler>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, args);
    subs.emplace_back(sub, c.fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config;
  }

  try {
    const bec::RunConfig cfg = load(args);
    const int jobs = args.jobs > 0 ? args.jobs : omp_get_num_procs();
    omp_set_num_threads(jobs);
    bec::kernels::set_parallel_threshold(cfg.parallel_threshold);
    for (const auto& [sub, fn] : subs)
      if (sub->parsed()) return fn(cfg, jobs);
  } catch (const bec::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return config;
  } catch (const bec::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return numerical;
  } catch (const bec::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return io;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return ok;
}
