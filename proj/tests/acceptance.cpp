// Acceptance runs: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "detmodes/config.hpp"
#include "detmodes/diagnostics.hpp"
#include "detmodes/littlewood_paley.hpp"
#include "detmodes/snapshot.hpp"
#include "detmodes/solver.hpp"
#include "detmodes/spectral.hpp"
#include "detmodes/sync.hpp"
#include "oracles.hpp"

using namespace detmodes;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double l2(const VectorField& u) { return std::sqrt(inner_product(u, u)); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

VectorField sample(const TorusGrid& g, const std::function<std::array<double, 3>(double, double, double)>& f) {
  PhysicalField p(g);
  const int n = g.n();
  const double h = g.dx();
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const auto v = f(ix * h, iy * h, iz * h);
        for (int c = 0; c < 3; ++c) p.at(c, ix, iy, iz) = v[c];
      }
  return leray_project(forward_transform(p));
}

VectorField no_forcing(const TorusGrid& g) {
  ForcingSpec none;
  none.kind = ForcingSpec::Kind::none;
  return build_forcing(g, none);
}

// Randomly centred, randomly polarized delta restricted to the dealiased band.
VectorField random_spike(const TorusGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double x = uni(rng) * g.length();
  const double y = uni(rng) * g.length();
  const double z = uni(rng) * g.length();
  const std::array<double, 3> a{uni(rng) - 0.5, uni(rng) - 0.5, uni(rng) - 0.5};
  VectorField s(g);
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    if (!g.in_dealiased_band(i) || g.k2(i) == 0) continue;
    const Wavevector k = g.wavevector(i);
    const double phase = -g.kappa0() * (k.x * x + k.y * y + k.z * z);
    for (int c = 0; c < 3; ++c) s.component(c)[i] = a[c] * Complex(std::cos(phase), std::sin(phase));
  }
  return leray_project(std::move(s));
}

Outcome partition_of_unity() {
  double pou = 0.0;
  double worst = 0.0;
  std::mt19937_64 rng(101);
  for (int n : {8, 16, 32}) {
    const TorusGrid g(n, kTwoPi);
    pou = std::max(pou, partition_of_unity_error(g));
    for (int i = 0; i < 100; ++i) {
      const VectorField u = oracle::gaussian_field(g, rng, 0.5, n);
      const VectorField d = ShellDecomposition(u).reconstruct() - u;
      worst = std::max(worst, l2(d) / l2(u));
    }
  }
  return {pou <= 1e-12 && worst <= 1e-10,
          "partition error " + fmt(pou) + ", worst reconstruction " + fmt(worst) + " over 300 fields"};
}

Outcome bernstein_property() {
  const TorusGrid g(48, kTwoPi);
  std::mt19937_64 rng(202);
  // Shells whose inner edge lies outside the dealiased ball only exist in
  // the cube corners and are left out.
  const int kmax = g.k_max_dealias();
  std::vector<double> per_q;
  std::vector<double> gaussian_per_q;
  for (int q = 0; 0.75 * std::ldexp(1.0, q) <= kmax; ++q) {
    double best = 0.0;
    double best_gauss = 0.0;
    for (int i = 0; i < 20; ++i) {
      const VectorField gauss = project_shell(oracle::gaussian_field(g, rng, 0.5, 48.0), q);
      const VectorField spike = project_shell(random_spike(g, rng), q);
      best_gauss = std::max(best_gauss, bernstein_ratio(gauss, q, 2.0, kInfinity));
      best = std::max({best, best_gauss, bernstein_ratio(spike, q, 2.0, kInfinity)});
    }
    per_q.push_back(best);
    gaussian_per_q.push_back(best_gauss);
  }
  const auto [lo, hi] = std::minmax_element(per_q.begin(), per_q.end());
  const auto [glo, ghi] = std::minmax_element(gaussian_per_q.begin(), gaussian_per_q.end());
  std::string maxima;
  for (double v : per_q) maxima += (maxima.empty() ? "" : " ") + fmt(v);
  return {*hi / *lo <= 10.0, "q = 0.." + std::to_string(per_q.size() - 1) + ", per-q maxima [" + maxima +
                                 "], spread " + fmt(*hi / *lo) + " (Gaussian shells alone: " + fmt(*ghi / *glo) +
                                 ")"};
}

Outcome exact_solutions() {
  const TorusGrid g32(32, kTwoPi);
  const VectorField tg = sample(g32, [](double x, double y, double) {
    return std::array<double, 3>{std::sin(x) * std::cos(y), -std::cos(x) * std::sin(y), 0.0};
  });
  Stepper tg_stepper(no_forcing(g32), 0.1, 1e-3);
  SolverState tg_state(tg);
  tg_stepper.advance_to(tg_state, 1.0);
  const VectorField tg_exact = tg * std::exp(-0.2);
  const double tg_err = l2(tg_state.u - tg_exact) / l2(tg_exact);

  const TorusGrid g16(16, kTwoPi);
  VectorField mode(g16);
  mode.set_mode(1, {3, 0, 0}, Complex(0.0, -0.5));
  mode = leray_project(std::move(mode));
  Stepper mode_stepper(no_forcing(g16), 0.07, 0.05);
  SolverState mode_state(mode);
  mode_stepper.advance_to(mode_state, 3.0);
  const VectorField mode_exact = mode * std::exp(-0.07 * 9.0 * 3.0);
  const double mode_err = l2(mode_state.u - mode_exact) / l2(mode_exact);

  const VectorField tgv = sample(g16, [](double x, double y, double z) {
    return std::array<double, 3>{std::sin(x) * std::cos(y) * std::cos(z), -std::cos(x) * std::sin(y) * std::cos(z),
                                 0.0};
  });
  auto run = [&](double dt) {
    Stepper s(no_forcing(g16), 0.05, dt);
    SolverState st(tgv);
    s.advance_to(st, 1.0);
    return st.u;
  };
  const VectorField reference = run(0.2 / 64);
  const double ratio = l2(run(0.2) - reference) / l2(run(0.1) - reference);
  return {tg_err <= 1e-8 && mode_err <= 1e-10 && ratio >= 12.0 && ratio <= 20.0,
          "Taylor-Green error " + fmt(tg_err) + ", single-mode error " + fmt(mode_err) + ", dt-halving ratio " +
              fmt(ratio)};
}

Outcome skew_symmetry() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = i % 2 ? 16 : 24;
    const TorusGrid g(n, i % 3 ? kTwoPi : 1.0);
    const VectorField u = dealias(oracle::gaussian_field(g, rng, 0.5, n, std::pow(10.0, (i % 7) - 3)));
    const double scale = l2(u) * std::sqrt(gradient_norm2(u)) * lebesgue_norm(u, kInfinity);
    worst = std::max(worst, std::abs(inner_product(nonlinear_term(u), u)) / scale);
  }
  return {worst <= 1e-10, "max |(N(u), u)| / (|u|_2 |grad u|_2 |u|_inf) = " + fmt(worst) + " over 100 fields"};
}

Outcome determining_oracle() {
  const TorusGrid g(16, kTwoPi);
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int mismatches = 0;
  std::vector<int> hits(static_cast<std::size_t>(DyadicMultiplier::q_max(g) + 2), 0);
  for (int i = 0; i < 50; ++i) {
    const double nu = 0.1;
    // Mostly low-band fields so that every index, saturation included, is hit.
    const double scale = std::pow(10.0, -6.0 + 2.0 * uni(rng));
    const double k_hi = i % 3 ? 1.2 + 2.0 * uni(rng) : 2.0 + 14.0 * uni(rng);
    const VectorField u = oracle::gaussian_field(g, rng, 0.5, k_hi, scale);
    const double r = 2.05 + 0.9 * uni(rng);
    const int expected = oracle::determining_index(u, r, 0.05, nu);
    const DyadicLevel got = determining_wavenumber(u, r, 0.05, nu);
    if (got.q != expected || got.saturated != (expected > DyadicMultiplier::q_max(g))) ++mismatches;
    ++hits[static_cast<std::size_t>(expected)];
  }
  std::string spread;
  for (std::size_t q = 0; q < hits.size(); ++q) spread += " Q" + std::to_string(q) + ":" + std::to_string(hits[q]);
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 50 fields;" + spread};
}

struct Series {
  std::vector<WavenumberRecord> records;
  /// Every tenth analysed state when requested; fields[j] goes with records[10 j].
  std::vector<VectorField> fields;
  std::uint64_t cfl_violations = 0;
};

// Integrates from a random field, analysing every `every` steps.
Series record_run(const TorusGrid& g, double nu, double amplitude, double urms, double dt, int steps, int every,
                  const DiagnosticParams& params, bool keep_fields = false) {
  ForcingSpec spec;
  spec.amplitude = amplitude;
  const VectorField f = build_forcing(g, spec);
  Stepper stepper(f, nu, dt);
  SolverState state(random_solenoidal_field(g, 1, {2.0, urms}));
  Series s;
  for (int i = 0; i <= steps; ++i) {
    if (i % every == 0) {
      s.records.push_back(analyze_field(state.u, state.t, params));
      if (keep_fields && (i / every) % 10 == 0) s.fields.push_back(state.u);
    }
    if (i < steps) stepper.advance(state);
  }
  s.cfl_violations = stepper.cfl_violations();
  return s;
}

struct OrderingCount {
  int snapshots = 0;
  int violations = 0;
  int resolved = 0;
};

OrderingCount ordering(const std::vector<WavenumberRecord>& records) {
  OrderingCount c;
  for (const auto& rec : records) {
    ++c.snapshots;
    if (!rec.saturated) ++c.resolved;
    if (rec.lambda < rec.lambda_dis) ++c.violations;
  }
  return c;
}

// Low-Reynolds forced run shared by the ordering, refinement and bound checks.
constexpr double kLowNu = 0.05;
constexpr double kLowAmplitude = 2e-4;
constexpr double kLowUrms = 1e-3;
constexpr double kLowDt = 0.05;
constexpr int kLowSteps = 500;

DiagnosticParams calibrated_params(const TorusGrid& g, double nu) {
  DiagnosticParams p;
  p.nu = nu;
  p.c0 = calibrated_c0(g, p.r, p.c_r);
  return p;
}

Series& low_re_run(int n) {
  static std::map<int, Series> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    const TorusGrid g(n, kTwoPi);
    it = cache
             .emplace(n, record_run(g, kLowNu, kLowAmplitude, kLowUrms, kLowDt, kLowSteps, 1,
                                    calibrated_params(g, kLowNu), n == 48))
             .first;
  }
  return it->second;
}

Outcome wavenumber_ordering() {
  const TorusGrid g(48, kTwoPi);
  const DiagnosticParams energetic = calibrated_params(g, 0.02);
  const Series turbulent = record_run(g, 0.02, 0.1, 0.5, 0.02, 500, 1, energetic);
  const OrderingCount a = ordering(turbulent.records);
  const OrderingCount b = ordering(low_re_run(48).records);
  return {a.violations == 0 && b.violations == 0 && a.snapshots >= 500 && b.snapshots >= 500,
          "c0 = " + fmt(energetic.c0) + "; energetic run: " + std::to_string(a.violations) + "/" +
              std::to_string(a.snapshots) + " violations (" + std::to_string(a.resolved) +
              " with Lambda resolved, CFL violations " + std::to_string(turbulent.cfl_violations) +
              "); low-Re run: " + std::to_string(b.violations) + "/" + std::to_string(b.snapshots) +
              " violations (" + std::to_string(b.resolved) + " resolved)"};
}

ExperimentConfig twin_config(double nu, double amplitude) {
  ExperimentConfig c;
  c.nu = nu;
  c.L = kTwoPi;
  c.N = 48;
  c.dt = 0.1;
  c.T_total = 50.0;
  c.forcing_amplitude = amplitude;
  c.init_urms = amplitude;
  return c;
}

std::string describe(const DecayReport& r) {
  return "sigma " + fmt(r.fit.sigma) + " (" + fmt(r.fit.sigma / r.envelope) + " x nu kappa0^2), |w(T)|/|w(0)| " +
         fmt(r.w_final / r.w0) + ", Q in [" + std::to_string(r.min_q) + "," + std::to_string(r.max_q) + "], " +
         std::to_string(r.saturated_steps) + " saturated steps";
}

Outcome synchronization() {
  const DecayReport laminar = run_twin_experiment(twin_config(0.1, 1e-4));
  const DecayReport moderate = run_twin_experiment(twin_config(0.05, 2e-4));
  auto synced = [](const DecayReport& r) { return r.w0 > 0.0 && r.w_final <= 1e-6 * r.w0 && r.fit.valid && r.fit.sigma > 0.0; };
  const bool pass = synced(laminar) && synced(moderate) && laminar.fit.sigma >= 0.5 * laminar.envelope;
  return {pass, "laminar: " + describe(laminar) + "; moderate: " + describe(moderate)};
}

Outcome steady_variant() {
  ExperimentConfig c = twin_config(0.1, 1e-4);
  c.sync_mode = SyncMode::steady;
  const DecayReport r = run_steady_reference_experiment(c);
  const double kappa0_nu = kTwoPi / c.L * c.nu;
  const bool pass = r.w0 > 0.0 && r.max_growth <= 1.0 && r.w_final <= 1e-6 * r.w0;
  return {pass, "max |w(t)|/|w(0)| " + fmt(r.max_growth) + ", " + describe(r) + ", sigma / (kappa0 nu) " +
                    fmt(r.fit.sigma / kappa0_nu)};
}

double max_pointwise(const std::vector<WavenumberRecord>& records, double nu, int& unresolved) {
  double m = 0.0;
  unresolved = 0;
  for (const auto& rec : records) {
    if (rec.saturated || !(rec.enstrophy > 0.0)) {
      ++unresolved;
      continue;
    }
    m = std::max(m, rec.lambda * nu * nu / rec.enstrophy);
  }
  return m;
}

Outcome pointwise_refinement() {
  int u32 = 0;
  int u48 = 0;
  const double m32 = max_pointwise(low_re_run(32).records, kLowNu, u32);
  const double m48 = max_pointwise(low_re_run(48).records, kLowNu, u48);
  const double change = std::abs(m48 - m32) / m32;
  const bool pass = std::isfinite(m32) && std::isfinite(m48) && m32 > 0.0 && u32 == 0 && u48 == 0 && change <= 0.2;
  return {pass, "max Lambda nu^2/|grad u|^2: N=32 " + fmt(m32) + ", N=48 " + fmt(m48) + ", change " +
                    fmt(100.0 * change) + "%"};
}

Outcome bound_reports_check() {
  const TorusGrid g(48, kTwoPi);
  const Series& run = low_re_run(48);
  const DiagnosticParams params = calibrated_params(g, kLowNu);
  ForcingSpec spec;
  spec.amplitude = kLowAmplitude;
  const double G = grashof(build_forcing(g, spec), kLowNu);

  // Store the kept states, then analyse the stored series twice.
  const fs::path dir = fs::temp_directory_path() / "detmodes_acceptance_series";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<fs::path> files;
  for (std::size_t j = 0; j < run.fields.size(); ++j) {
    files.push_back(dir / ("s" + std::to_string(j) + ".bin"));
    write_snapshot(files.back(), make_snapshot(run.fields[j], kLowNu, run.records[10 * j].t, 1));
  }
  auto analyse_stored = [&] {
    std::vector<WavenumberRecord> recs;
    for (const auto& p : files) {
      const Snapshot s = read_snapshot(p);
      recs.push_back(analyze_field(snapshot_field(s), s.header.t, params));
    }
    return recs;
  };
  const auto first = analyse_stored();
  const auto second = analyse_stored();
  fs::remove_all(dir);
  const AveragedDiagnostics a1 = average_diagnostics(first, params, g.length(), G);
  const AveragedDiagnostics a2 = average_diagnostics(second, params, g.length(), G);
  const AveragedDiagnostics full = average_diagnostics(run.records, params, g.length(), G);
  const BoundReport report = bound_reports(first, a1, params);

  bool rows_ok = report.all_finite && report.rows.size() == 6;
  std::string ratios;
  for (const auto& row : report.rows) {
    rows_ok = rows_ok && std::isfinite(row.ratio) && row.rhs > 0.0;
    ratios += (ratios.empty() ? "" : ", ") + row.name.substr(0, row.name.find(':')) + " " + fmt(row.ratio);
  }
  const bool d_ok = a1.d >= 0.0 && a1.d <= 3.0 && std::abs(a1.d - a2.d) <= 1e-3;
  return {rows_ok && d_ok, "ratios [" + ratios + "]; d = " + fmt(a1.d) + " (rerun " + fmt(a2.d) +
                               ", full in-memory series " + fmt(full.d) + "), G = " + fmt(G) + ", " +
                               std::to_string(a1.n_used) + " stored samples"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"partition of unity and shell reconstruction", 10, partition_of_unity},
      {"Bernstein ratio bounded across shells", 30, bernstein_property},
      {"exact solutions and fourth-order time stepping", 120, exact_solutions},
      {"skew-symmetry of the nonlinear term", 30, skew_symmetry},
      {"determining wavenumber matches the exhaustive oracle", 60, determining_oracle},
      {"Lambda_{u,r} >= Lambda^dis with calibrated c0", 600, wavenumber_ordering},
      {"twin synchronization at N=48", 1200, synchronization},
      {"steady-state variant", 600, steady_variant},
      {"pointwise ratio stable under refinement", 900, pointwise_refinement},
      {"bound reports and intermittency dimension", 300, bound_reports_check},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= criteria[i].budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::cout << "criterion " << i + 1 << " [" << criteria[i].name << "]: " << (pass ? "PASS" : "FAIL") << " ("
              << o.detail << "; " << fmt(seconds) << " s" << (in_time ? "" : " over budget") << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
