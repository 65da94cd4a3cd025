// detmodes: simulate, sync, analyze and spectrum subcommands.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "detmodes/config.hpp"
#include "detmodes/csv.hpp"
#include "detmodes/diagnostics.hpp"
#include "detmodes/littlewood_paley.hpp"
#include "detmodes/snapshot.hpp"
#include "detmodes/solver.hpp"
#include "detmodes/spectral.hpp"
#include "detmodes/sync.hpp"

namespace fs = std::filesystem;
using namespace detmodes;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kDiverged = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigOptions {
  std::string path;
  std::map<std::string, std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigOptions& opts) {
  cmd->add_option("--config", opts.path, "Experiment configuration file")->required();
  for (const auto& key : config_keys()) {
    cmd->add_option_function<std::string>(
        "--" + key, [&opts, key](const std::string& v) { opts.overrides[key] = v; },
        "Override config key " + key);
  }
}

ExperimentConfig load_config(const ConfigOptions& opts) {
  std::ifstream in(opts.path);
  if (!in) throw UsageError("cannot read config file '" + opts.path + "'");
  std::stringstream text;
  text << in.rdbuf();
  // Command-line values replace the file's lines for the same key and may
  // supply required keys the file lacks.
  std::istringstream lines(text.str());
  std::string merged;
  for (std::string line; std::getline(lines, line);) {
    const std::string body = line.substr(0, line.find('#'));
    if (const auto eq = body.find('='); eq != std::string::npos) {
      std::string key = body.substr(0, eq);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t\r") + 1);
      if (opts.overrides.count(key)) continue;
    }
    merged += line + "\n";
  }
  for (const auto& [key, value] : opts.overrides) merged += key + " = " + value + "\n";
  const ExperimentConfig config = parse_config(merged);
  return config;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

std::string snapshot_name(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06llu.bin", static_cast<unsigned long long>(index));
  return buf;
}

std::uint64_t stride_for(double interval, double dt) {
  if (!(interval > 0.0)) return 1;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(interval / dt)));
}

const std::vector<std::string> kRecordColumns = {
    "t[time]",           "energy[length^5/time^2]", "enstrophy[length^3/time^2]", "Lambda[1/length]",
    "Q[index]",          "Lambda_saturated[flag]",  "Lambda_dis[1/length]",       "Q_dis[index]",
    "Lambda_dis_saturated[flag]", "pointwise_ratio[1]"};

std::vector<CsvCell> record_cells(const WavenumberRecord& rec, double nu) {
  const double ratio = rec.enstrophy > 0.0 && !rec.saturated ? rec.lambda * nu * nu / rec.enstrophy
                                                             : std::numeric_limits<double>::quiet_NaN();
  return {rec.t,
          rec.energy,
          rec.enstrophy,
          rec.lambda,
          std::int64_t{rec.q},
          std::int64_t{rec.saturated},
          rec.lambda_dis,
          std::int64_t{rec.q_dis},
          std::int64_t{rec.dis_saturated},
          ratio};
}

void write_shell_rows(CsvWriter& csv, const WavenumberRecord& rec, double length) {
  for (std::size_t q = 0; q < rec.shell_l2.size(); ++q) {
    csv.row({rec.t, static_cast<std::int64_t>(q), dyadic_wavenumber(static_cast<int>(q), length), rec.shell_lr[q],
             rec.shell_l2[q], rec.rh[q], rec.rl[q]});
  }
}

void write_bounds(const fs::path& path, const AveragedDiagnostics& avg, const BoundReport& report) {
  auto out = open_output(path);
  CsvWriter csv(out, {"bound[name]", "lhs[1/length]", "rhs[1/length]", "ratio[1]"});
  for (const auto& row : report.rows) csv.row({row.name, row.lhs, row.rhs, row.ratio});
  (void)avg;
}

void write_summary(std::ostream& out, const AveragedDiagnostics& avg, const BoundReport& report) {
  out << "# grashof = |f|_{H^-1} / (nu^2 kappa0^{1/2}); normalizing by lambda0^{1/2} instead multiplies it by "
         "(2 pi)^{1/2}\n"
      << "window = " << format_number(avg.window) << '\n'
      << "samples_used = " << avg.n_used << '\n'
      << "samples_saturated = " << avg.n_saturated << '\n'
      << "lambda0 = " << format_number(avg.lambda0) << '\n'
      << "mean_Lambda = " << format_number(avg.mean_lambda) << '\n'
      << "mean_Lambda_excess = " << format_number(avg.mean_lambda_excess) << '\n'
      << "mean_Lambda_indicator = " << format_number(avg.mean_lambda_indicator) << '\n'
      << "mean_enstrophy = " << format_number(avg.mean_enstrophy) << '\n'
      << "d = " << format_number(avg.d) << (avg.d_overridden ? " (override)" : "") << '\n'
      << "d_constant = " << format_number(avg.d_constant) << '\n'
      << "eps = " << format_number(avg.eps) << '\n'
      << "kappa_d = " << format_number(avg.kappa_d) << '\n'
      << "grashof = " << format_number(avg.grashof) << '\n'
      << "max_pointwise_ratio = " << format_number(report.max_pointwise_ratio) << '\n'
      << "ratios_finite = " << (report.all_finite ? "yes" : "no") << '\n';
}

std::vector<WavenumberRecord> averaging_window(const std::vector<WavenumberRecord>& records,
                                               std::optional<double> t_avg) {
  if (!t_avg || records.empty()) return records;
  const double t0 = records.back().t - *t_avg;
  std::vector<WavenumberRecord> out;
  for (const auto& r : records) {
    if (r.t >= t0 - 1e-12 * std::abs(t0)) out.push_back(r);
  }
  return out;
}

int run_simulate(const ConfigOptions& opts) {
  const ExperimentConfig config = load_config(opts);
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "config.txt");
    out << dump_config(config);
  }
  const TorusGrid grid(config.N, config.L);
  const VectorField f = build_forcing(grid, config.forcing_spec());
  const DiagnosticParams params = config.diagnostic_params();
  const double G = grashof(f, config.nu);
  std::clog << "seed_u = " << config.seed_u << ", Grashof number = " << G << '\n';

  Stepper stepper(f, config.nu, config.dt);
  SolverState state(random_solenoidal_field(grid, config.seed_u, config.initial_spec()));

  auto records_out = open_output(dir / "diagnostics.csv");
  auto shells_out = open_output(dir / "shells.csv");
  auto budget_out = open_output(dir / "energy.csv");
  CsvWriter records_csv(records_out, kRecordColumns);
  CsvWriter shells_csv(shells_out, {"t[time]", "q[index]", "lambda_q[1/length]", "norm_Lr[length^(1+3/r)/time]",
                                    "norm_L2[length^(5/2)/time]", "Rh[1]", "Rl[1]"});
  CsvWriter budget_csv(budget_out, {"t[time]", "energy[length^5/time^2]", "dissipation[length^5/time^3]",
                                    "injection[length^5/time^3]"});

  const auto total = static_cast<std::uint64_t>(std::llround(config.T_total / config.dt));
  const std::uint64_t sample_stride = stride_for(config.sample_interval, config.dt);
  const std::uint64_t snap_stride = stride_for(config.snapshot_interval, config.dt);
  std::vector<WavenumberRecord> records;
  std::uint64_t snapshots = 0;

  auto observe = [&](std::uint64_t step) {
    const auto b = energy_budget(state.u, f, config.nu);
    budget_csv.row({state.t, b.energy, b.dissipation, b.injection});
    if (step % sample_stride == 0 || step == total) {
      records.push_back(analyze_field(state.u, state.t, params));
      records_csv.row(record_cells(records.back(), config.nu));
      write_shell_rows(shells_csv, records.back(), config.L);
    }
    if (config.snapshot_interval > 0.0 && step % snap_stride == 0) {
      write_snapshot(dir / snapshot_name(snapshots++), make_snapshot(state.u, config.nu, state.t, config.seed_u));
    }
  };

  try {
    observe(0);
    for (std::uint64_t step = 1; step <= total; ++step) {
      stepper.advance(state);
      observe(step);
    }
  } catch (const DivergenceError& e) {
    const auto& good = e.last_good();
    write_snapshot(dir / "diverged_last_good.bin", make_snapshot(good.u, config.nu, good.t, config.seed_u));
    std::cerr << "error: " << e.what() << "; last good state written to "
              << (dir / "diverged_last_good.bin").string() << '\n';
    return kDiverged;
  }
  if (stepper.cfl_violations() > 0) {
    std::clog << "warning: " << stepper.cfl_violations() << " steps exceeded the advective CFL limit (max "
              << stepper.max_cfl() << " > 0.5)\n";
  }

  const auto window = averaging_window(records, config.T_avg);
  const AveragedDiagnostics avg = average_diagnostics(window, params, config.L, G, config.d_override);
  const BoundReport report = bound_reports(window, avg, params);
  write_bounds(dir / "bounds.csv", avg, report);
  {
    auto out = open_output(dir / "summary.txt");
    write_summary(out, avg, report);
  }
  const double band_edge = grid.k_max_dealias() * grid.kappa0();
  std::clog << "resolution check: kappa_d = " << avg.kappa_d << ", dealiased edge = " << band_edge
            << (avg.kappa_d <= band_edge ? " (resolved)" : " (under-resolved)") << '\n';
  return kOk;
}

int run_sync(const ConfigOptions& opts) {
  const ExperimentConfig config = load_config(opts);
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  std::optional<DecayReport> result;
  try {
    result = config.sync_mode == SyncMode::twin ? run_twin_experiment(config)
                                                : run_steady_reference_experiment(config);
  } catch (const DivergenceError& e) {
    const auto& good = e.last_good();
    write_snapshot(dir / "diverged_last_good.bin", make_snapshot(good.u, config.nu, good.t, config.seed_u));
    std::cerr << "error: " << e.what() << "; last good state written to "
              << (dir / "diverged_last_good.bin").string() << '\n';
    return kDiverged;
  }
  const DecayReport& report = *result;
  {
    auto out = open_output(dir / "w_norm.csv");
    CsvWriter csv(out, {"t[time]", "w_L2[length^(5/2)/time]", "w_H1[length^(3/2)/time]", "Q[index]",
                        "Lambda_u[1/length]", "Lambda_v[1/length]", "saturated_flag[flag]"});
    for (const auto& s : report.history) {
      csv.row({s.t, s.w_l2, s.w_h1, std::int64_t{s.q}, s.lambda_u, s.lambda_v, std::int64_t{s.saturated}});
    }
  }
  auto out = open_output(dir / "decay_report.txt");
  out << "mode = " << to_string(config.sync_mode) << '\n'
      << "fit_valid = " << (report.fit.valid ? "yes" : "no") << '\n'
      << "sigma = " << format_number(report.fit.sigma) << '\n'
      << "envelope_nu_kappa0_sq = " << format_number(report.envelope) << '\n'
      << "sigma_over_envelope = " << format_number(report.fit.sigma / report.envelope) << '\n'
      << "fit_window = " << format_number(report.fit.t_start) << " " << format_number(report.fit.t_end) << '\n'
      << "fit_points = " << report.fit.points << '\n'
      << "c_r = " << format_number(report.c_r) << '\n'
      << "r = " << format_number(report.r) << '\n'
      << "w0_before_enforcement = " << format_number(report.w0_before) << '\n'
      << "w0 = " << format_number(report.w0) << '\n'
      << "w_final = " << format_number(report.w_final) << '\n'
      << "w_final_over_w0 = " << format_number(report.w0 > 0 ? report.w_final / report.w0 : 0.0) << '\n'
      << "max_growth = " << format_number(report.max_growth) << '\n'
      << "max_enforcement_ratio = " << format_number(report.max_enforcement_ratio) << '\n'
      << "Q_range = " << report.min_q << " " << report.max_q << '\n'
      << "steps = " << report.steps << '\n'
      << "saturated_steps = " << report.saturated_steps << '\n'
      << "cfl_violations = " << report.cfl_violations << '\n';
  std::clog << "sigma = " << report.fit.sigma << " vs envelope nu kappa0^2 = " << report.envelope << '\n';
  return kOk;
}

struct AnalyzeOptions {
  std::vector<std::string> snapshots;
  std::optional<double> nu;
  double r = 2.5;
  double c_r = 0.05;
  double c0 = 0.05;
  std::string output_dir = ".";
  std::string bounds;
  std::optional<double> d_override;
  std::string config;
};

int run_analyze(const AnalyzeOptions& opts) {
  if (!(opts.r > 2.0 && opts.r < 3.0)) throw ConfigError("r must lie in the open interval (2,3)");
  std::vector<Snapshot> snaps;
  for (const auto& path : opts.snapshots) snaps.push_back(read_snapshot(path));
  std::stable_sort(snaps.begin(), snaps.end(),
                   [](const Snapshot& a, const Snapshot& b) { return a.header.t < b.header.t; });
  std::vector<WavenumberRecord> records;
  DiagnosticParams params{opts.nu.value_or(snaps.front().header.nu), opts.r, opts.c_r, opts.c0};
  for (const auto& s : snaps) {
    if (s.header.n != snaps.front().header.n || s.header.length != snaps.front().header.length) {
      throw ConfigError("snapshots use different grids");
    }
    records.push_back(analyze_field(snapshot_field(s), s.header.t, params));
  }

  const fs::path dir = opts.output_dir;
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "wavenumbers.csv");
    CsvWriter csv(out, {"t[time]", "Lambda[1/length]", "Q[index]", "Lambda_dis[1/length]",
                        "enstrophy[length^3/time^2]", "energy[length^5/time^2]", "saturated[flag]"});
    for (const auto& rec : records) {
      csv.row({rec.t, rec.lambda, std::int64_t{rec.q}, rec.lambda_dis, rec.enstrophy, rec.energy,
               std::int64_t{rec.saturated}});
    }
  }

  const double length = snaps.front().header.length;
  double G = std::numeric_limits<double>::quiet_NaN();
  if (!opts.config.empty()) {
    ConfigOptions co{opts.config, {}};
    const ExperimentConfig cfg = load_config(co);
    G = grashof(build_forcing(TorusGrid(static_cast<int>(snaps.front().header.n), length), cfg.forcing_spec()),
                params.nu);
  }
  const auto avg = average_diagnostics(records, params, length, G, opts.d_override);
  const auto report = bound_reports(records, avg, params);
  if (!opts.bounds.empty()) write_bounds(opts.bounds, avg, report);
  auto out = open_output(dir / "report.txt");
  write_summary(out, avg, report);
  out << "\n# bound: lhs rhs ratio\n";
  for (const auto& row : report.rows) {
    out << row.name << " | " << format_number(row.lhs) << " " << format_number(row.rhs) << " "
        << format_number(row.ratio) << '\n';
  }
  return kOk;
}

struct SpectrumOptions {
  std::string snapshot;
  std::string output;
  bool shells = false;
  double r = 2.5;
};

int run_spectrum(const SpectrumOptions& opts) {
  const Snapshot snap = read_snapshot(opts.snapshot);
  const VectorField u = snapshot_field(snap);
  const TorusGrid& g = u.grid();
  std::ofstream file;
  if (!opts.output.empty()) file = open_output(opts.output);
  std::ostream& out = opts.output.empty() ? std::cout : file;
  if (opts.shells) {
    const ShellNorms lr = shell_norms(u, opts.r);
    const ShellNorms l2 = shell_norms(u, 2.0);
    const ShellNorms linf = shell_norms(u, kInfinity);
    CsvWriter csv(out, {"q[index]", "lambda_q[1/length]", "shell_L2[length^(5/2)/time]",
                        "shell_Lr[length^(1+3/r)/time]", "shell_Linf[length/time]"});
    for (int q = -1; q <= lr.q_max(); ++q) {
      csv.row({std::int64_t{q}, q < 0 ? 0.0 : dyadic_wavenumber(q, g.length()), l2.at(q), lr.at(q), linf.at(q)});
    }
    return kOk;
  }
  // Shell-summed energy in unit bins |k| in [m - 1/2, m + 1/2).
  const int bins = static_cast<int>(std::ceil(std::sqrt(double(g.max_band_k2())))) + 1;
  std::vector<double> energy(static_cast<std::size_t>(bins), 0.0);
  const double volume = std::pow(g.length(), 3);
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const int k2 = g.k2(i);
    if (k2 == 0) continue;
    const auto bin = static_cast<std::size_t>(std::lround(std::sqrt(double(k2))));
    if (bin >= energy.size()) continue;
    double a2 = 0.0;
    for (int c = 0; c < 3; ++c) a2 += std::norm(u.component(c)[i]);
    energy[bin] += 0.5 * g.hermitian_weight(i) * a2 * volume;
  }
  CsvWriter csv(out, {"k[1/length]", "E[length^6/time^2]"});
  for (int m = 1; m < bins; ++m) {
    csv.row({m * g.kappa0(), energy[static_cast<std::size_t>(m)] / g.kappa0()});
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Determining-wavenumber diagnostics for forced Navier-Stokes flows on the periodic cube"};
  app.require_subcommand(1);

  ConfigOptions sim_opts;
  auto* sim = app.add_subcommand("simulate", "Integrate one trajectory and record wavenumber diagnostics");
  add_config_options(sim, sim_opts);

  ConfigOptions sync_opts;
  auto* sync = app.add_subcommand("sync", "Twin experiment with low-mode enforcement");
  add_config_options(sync, sync_opts);

  AnalyzeOptions an_opts;
  auto* analyze = app.add_subcommand("analyze", "Wavenumber diagnostics of stored snapshots");
  analyze->add_option("snapshots", an_opts.snapshots, "Snapshot files")->required()->check(CLI::ExistingFile);
  analyze->add_option("--nu", an_opts.nu, "Viscosity (default: from the snapshot header)");
  analyze->add_option("--r", an_opts.r, "Lebesgue exponent in (2,3)");
  analyze->add_option("--c_r", an_opts.c_r, "Determining-wavenumber threshold");
  analyze->add_option("--c0", an_opts.c0, "Dissipation-wavenumber threshold");
  analyze->add_option("--output_dir", an_opts.output_dir, "Directory for wavenumbers.csv and report.txt");
  analyze->add_option("--bounds", an_opts.bounds, "Write averaged bound reports to this CSV");
  analyze->add_option("--d_override", an_opts.d_override, "Use this intermittency dimension");
  analyze->add_option("--config", an_opts.config, "Config supplying the forcing for the Grashof number")
      ->check(CLI::ExistingFile);

  SpectrumOptions sp_opts;
  auto* spectrum = app.add_subcommand("spectrum", "Energy spectrum or dyadic shell norms of a snapshot");
  spectrum->add_option("snapshot", sp_opts.snapshot, "Snapshot file")->required()->check(CLI::ExistingFile);
  spectrum->add_option("--output", sp_opts.output, "CSV destination (default: stdout)");
  spectrum->add_flag("--shells", sp_opts.shells, "Report Littlewood-Paley shell norms instead");
  spectrum->add_option("--r", sp_opts.r, "Lebesgue exponent for --shells");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_opts);
    if (sync->parsed()) return run_sync(sync_opts);
    if (analyze->parsed()) return run_analyze(an_opts);
    if (spectrum->parsed()) return run_spectrum(sp_opts);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (const RelaxationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kUsage;
}
