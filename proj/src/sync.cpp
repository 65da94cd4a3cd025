#include "detmodes/sync.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "detmodes/littlewood_paley.hpp"
#include "detmodes/solver.hpp"
#include "detmodes/spectral.hpp"

namespace detmodes {

namespace {

double l2_norm(const VectorField& w) { return std::sqrt(inner_product(w, w)); }

long long band_limit(int big_q) { return 1LL << (2 * (big_q + 1)); }

struct Level {
  int q = 0;
  bool saturated = false;
  double lambda_u = 0.0;
  double lambda_v = 0.0;
};

class Recorder {
 public:
  Recorder(DecayReport& report, const TwinParams& params, std::uint64_t total_steps)
      : report_(report), params_(params), total_(total_steps) {}

  void record(double t, const VectorField& w, const Level& level, std::uint64_t step) {
    if (level.saturated) ++report_.saturated_steps;
    if (report_.history.empty()) {
      report_.min_q = report_.max_q = level.q;
    } else {
      report_.min_q = std::min(report_.min_q, level.q);
      report_.max_q = std::max(report_.max_q, level.q);
    }
    const double wl2 = l2_norm(w);
    report_.w_final = wl2;
    if (report_.w0 > 0.0) report_.max_growth = std::max(report_.max_growth, wl2 / report_.w0);
    const bool keep = step == 0 || step == total_ || step % static_cast<std::uint64_t>(params_.record_every) == 0;
    if (!keep) return;
    report_.history.push_back(
        {t, wl2, std::sqrt(gradient_norm2(w)), level.q, level.lambda_u, level.lambda_v, level.saturated});
    if (params_.log && total_ >= 10 && step % (total_ / 10) == 0) {
      *params_.log << "t = " << t << "  |w|_2 = " << wl2 << "  Q = " << level.q
                   << (level.saturated ? " (saturated)" : "") << '\n';
    }
  }

  void enforcement(double before, double after) {
    if (before > 0.0) report_.max_enforcement_ratio = std::max(report_.max_enforcement_ratio, after / before);
  }

 private:
  DecayReport& report_;
  const TwinParams& params_;
  std::uint64_t total_;
};

void check_params(const TwinParams& p, const VectorField& a, const VectorField& b, const VectorField& f) {
  if (!(a.grid() == b.grid()) || !(a.grid() == f.grid())) throw std::invalid_argument("twin fields use different grids");
  if (!(p.t_total > 0.0) || !(p.dt > 0.0)) throw std::invalid_argument("twin run needs positive dt and duration");
  if (p.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
}

DecayReport make_report(const VectorField& f, const TwinParams& p) {
  DecayReport r;
  const double kappa0 = f.grid().kappa0();
  r.envelope = p.diagnostics.nu * kappa0 * kappa0;
  r.c_r = p.diagnostics.c_r;
  r.r = p.diagnostics.r;
  return r;
}

}  // namespace

VectorField enforce_low_mode_equality(const VectorField& u, const VectorField& v, int big_q) {
  const TorusGrid& g = u.grid();
  if (!(g == v.grid())) throw std::invalid_argument("enforce_low_mode_equality: grids differ");
  if (big_q >= DyadicMultiplier::q_max(g)) return u;
  VectorField out = v;
  const long long limit = band_limit(big_q);
  for (int c = 0; c < 3; ++c) {
    const auto src = u.component(c);
    auto dst = out.component(c);
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (g.k2(i) < limit) dst[i] = src[i];
    }
  }
  out.mark_divergence_free(u.divergence_free() && v.divergence_free());
  return out;
}

VectorField high_pass(const VectorField& u, int big_q) {
  const TorusGrid& g = u.grid();
  VectorField out = u;
  const long long limit = big_q < -1 ? 0 : band_limit(big_q);
  for (int c = 0; c < 3; ++c) {
    auto dst = out.component(c);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      if (g.k2(i) < limit) dst[i] = Complex{};
    }
  }
  return out;
}

DecayFit fit_decay_rate(const std::vector<WNormSample>& history, double transient_fraction, double floor_fraction) {
  DecayFit fit;
  if (history.size() < 3 || !(history.front().w_l2 > 0.0)) return fit;
  const double floor = floor_fraction * history.front().w_l2;
  std::size_t end = 0;
  while (end < history.size() && history[end].w_l2 > floor) ++end;
  if (end < 3) return fit;
  const double t0 = history.front().t;
  const double t_start = t0 + transient_fraction * (history[end - 1].t - t0);
  std::size_t begin = 0;
  while (begin < end && history[begin].t < t_start) ++begin;
  if (end - begin < 2) begin = end >= 2 ? end - 2 : 0;

  double st = 0.0;
  double sy = 0.0;
  double stt = 0.0;
  double sty = 0.0;
  const double n = double(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const double t = history[i].t;
    const double y = 2.0 * std::log(history[i].w_l2);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = n * stt - st * st;
  if (!(denom > 0.0)) return fit;
  const double slope = (n * sty - st * sy) / denom;
  fit.valid = true;
  fit.sigma = -slope;
  fit.intercept = (sy - slope * st) / n;
  fit.t_start = history[begin].t;
  fit.t_end = history[end - 1].t;
  fit.points = static_cast<int>(end - begin);
  return fit;
}

DecayReport run_twin_experiment(const VectorField& u0, const VectorField& v0, const VectorField& forcing,
                                const TwinParams& params) {
  check_params(params, u0, v0, forcing);
  const auto& dp = params.diagnostics;
  const int qmax = DyadicMultiplier::q_max(u0.grid());
  auto level_of = [&](const VectorField& u, const VectorField& v) {
    const DyadicLevel lu = determining_wavenumber(u, dp.r, dp.c_r, dp.nu);
    const DyadicLevel lv = determining_wavenumber(v, dp.r, dp.c_r, dp.nu);
    Level l;
    l.saturated = lu.saturated || lv.saturated;
    l.q = l.saturated ? qmax : std::max(lu.q, lv.q);
    l.lambda_u = lu.lambda;
    l.lambda_v = lv.lambda;
    return l;
  };

  const auto total = static_cast<std::uint64_t>(std::llround(params.t_total / params.dt));
  DecayReport report = make_report(forcing, params);
  Recorder rec(report, params, total);
  Stepper su(forcing, dp.nu, params.dt);
  Stepper sv(forcing, dp.nu, params.dt);
  SolverState u(u0);
  SolverState v(v0);

  Level level = level_of(u.u, v.u);
  report.w0_before = l2_norm(u.u - v.u);
  v.u = enforce_low_mode_equality(u.u, v.u, level.q);
  report.w0 = l2_norm(u.u - v.u);
  rec.enforcement(report.w0_before, report.w0);
  rec.record(u.t, u.u - v.u, level, 0);

  for (std::uint64_t step = 1; step <= total; ++step) {
    su.advance(u);
    sv.advance(v);
    level = level_of(u.u, v.u);
    const double before = l2_norm(u.u - v.u);
    v.u = enforce_low_mode_equality(u.u, v.u, level.q);
    const VectorField w = u.u - v.u;
    rec.enforcement(before, l2_norm(w));
    rec.record(u.t, w, level, step);
  }
  report.steps = total;
  report.cfl_violations = su.cfl_violations() + sv.cfl_violations();
  report.fit = fit_decay_rate(report.history);
  return report;
}

DecayReport run_steady_reference_experiment(const VectorField& v_steady, const VectorField& u0,
                                            const VectorField& forcing, const TwinParams& params) {
  check_params(params, u0, v_steady, forcing);
  const auto& dp = params.diagnostics;
  const int qmax = DyadicMultiplier::q_max(u0.grid());
  auto level_of = [&](const VectorField& v) {
    const DyadicLevel lv = determining_wavenumber(v, dp.r, dp.c_r, dp.nu);
    Level l;
    l.saturated = lv.saturated;
    l.q = lv.saturated ? qmax : lv.q;
    l.lambda_u = std::numeric_limits<double>::quiet_NaN();
    l.lambda_v = lv.lambda;
    return l;
  };

  const auto total = static_cast<std::uint64_t>(std::llround(params.t_total / params.dt));
  DecayReport report = make_report(forcing, params);
  Recorder rec(report, params, total);
  Stepper su(forcing, dp.nu, params.dt);
  Stepper sv(forcing, dp.nu, params.dt);
  SolverState u(u0);
  // The steady state is advanced too so that u and v are discrete
  // trajectories of the same scheme; it stays put up to the relaxation tolerance.
  SolverState v(v_steady);

  Level level = level_of(v.u);
  report.w0_before = l2_norm(u.u - v.u);
  u.u = enforce_low_mode_equality(v.u, u.u, level.q);
  report.w0 = l2_norm(u.u - v.u);
  rec.enforcement(report.w0_before, report.w0);
  rec.record(u.t, u.u - v.u, level, 0);

  for (std::uint64_t step = 1; step <= total; ++step) {
    su.advance(u);
    sv.advance(v);
    level = level_of(v.u);
    const double before = l2_norm(u.u - v.u);
    u.u = enforce_low_mode_equality(v.u, u.u, level.q);
    const VectorField w = u.u - v.u;
    rec.enforcement(before, l2_norm(w));
    rec.record(u.t, w, level, step);
  }
  report.steps = total;
  report.cfl_violations = su.cfl_violations() + sv.cfl_violations();
  report.fit = fit_decay_rate(report.history);
  return report;
}

TwinParams twin_params(const ExperimentConfig& config, std::ostream* log) {
  TwinParams p;
  p.dt = config.dt;
  p.t_total = config.T_total;
  p.diagnostics = config.diagnostic_params();
  p.record_every = 1;
  if (config.sample_interval > 0.0) {
    p.record_every = std::max(1, static_cast<int>(std::llround(config.sample_interval / config.dt)));
  }
  p.log = log;
  return p;
}

DecayReport run_twin_experiment(const ExperimentConfig& config) {
  validate(config);
  const TorusGrid grid(config.N, config.L);
  const VectorField f = build_forcing(grid, config.forcing_spec());
  const VectorField u0 = random_solenoidal_field(grid, config.seed_u, config.initial_spec());
  const VectorField v0 = random_solenoidal_field(grid, config.seed_v, config.initial_spec());
  return run_twin_experiment(u0, v0, f, twin_params(config));
}

DecayReport run_steady_reference_experiment(const ExperimentConfig& config) {
  validate(config);
  const TorusGrid grid(config.N, config.L);
  const VectorField f = build_forcing(grid, config.forcing_spec());
  RelaxOptions relax;
  relax.dt = config.dt;
  const VectorField v = relax_to_steady(f, config.nu, config.steady_tol, relax);
  const DyadicLevel lv = determining_wavenumber(v, config.r, config.c_r, config.nu);
  const int cut = lv.saturated ? DyadicMultiplier::q_max(grid) : lv.q;
  RandomFieldSpec spec = config.initial_spec();
  spec.k0 = std::max(spec.k0, std::ldexp(1.0, cut + 1));
  VectorField perturbation = high_pass(random_solenoidal_field(grid, config.seed_u, spec), cut);
  const double rms = l2_norm(perturbation) / std::sqrt(3.0 * std::pow(config.L, 3));
  if (rms > 0.0) perturbation *= config.perturbation_urms / rms;
  return run_steady_reference_experiment(v, v + perturbation, f, twin_params(config));
}

}  // namespace detmodes
