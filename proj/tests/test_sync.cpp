#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "detmodes/littlewood_paley.hpp"
#include "detmodes/solver.hpp"
#include "detmodes/spectral.hpp"
#include "detmodes/sync.hpp"
#include "oracles.hpp"

using namespace detmodes;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double l2(const VectorField& u) { return std::sqrt(inner_product(u, u)); }

ExperimentConfig laminar_config() {
  ExperimentConfig c;
  c.nu = 0.1;
  c.L = kTwoPi;
  c.N = 16;
  c.dt = 0.05;
  c.T_total = 10.0;
  c.forcing_amplitude = 1e-4;
  c.init_urms = 1e-4;
  return c;
}

std::vector<WNormSample> exponential_history(double sigma, double w0, double dt, int steps) {
  std::vector<WNormSample> h;
  for (int i = 0; i <= steps; ++i) {
    WNormSample s;
    s.t = i * dt;
    s.w_l2 = w0 * std::exp(-0.5 * sigma * s.t);
    h.push_back(s);
  }
  return h;
}

}  // namespace

TEST_CASE("low-mode enforcement") {
  std::mt19937_64 rng(8);
  const TorusGrid g(16, kTwoPi);
  const int qmax = DyadicMultiplier::q_max(g);
  const VectorField u = oracle::gaussian_field(g, rng, 0.5, 16.0);
  const VectorField v = oracle::gaussian_field(g, rng, 0.5, 16.0);
  for (int q = 0; q < qmax; ++q) {
    const VectorField e = enforce_low_mode_equality(u, v, q);
    CHECK(enforce_low_mode_equality(u, e, q) == e);
    // The partial-sum multiplier only sees copied coefficients.
    CHECK(project_below(e, q) == project_below(u, q));
    CHECK(l2(u - e) <= l2(u - v));
    CHECK(high_pass(e, q) == high_pass(v, q));
    CHECK(l2(high_pass(u, q) + (u - high_pass(u, q)) - u) == 0.0);
  }
  CHECK(enforce_low_mode_equality(u, v, qmax) == u);
  CHECK(enforce_low_mode_equality(u, v, qmax + 1) == u);
}

TEST_CASE("decay fit on synthetic histories") {
  const auto h = exponential_history(0.3, 2.0, 0.1, 200);
  const DecayFit fit = fit_decay_rate(h);
  REQUIRE(fit.valid);
  CHECK(fit.sigma == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(fit.t_start == doctest::Approx(2.0));
  CHECK(fit.points == 181);

  // A roundoff plateau after the decay is excluded from the fit.
  auto plateau = exponential_history(4.0, 1.0, 0.1, 200);
  for (auto& s : plateau) s.w_l2 = std::max(s.w_l2, 1e-15);
  const DecayFit cut = fit_decay_rate(plateau);
  REQUIRE(cut.valid);
  CHECK(cut.sigma == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(cut.t_end < 14.0);

  CHECK_FALSE(fit_decay_rate({}).valid);
  std::vector<WNormSample> zero(5);
  CHECK_FALSE(fit_decay_rate(zero).valid);
}

TEST_CASE("identical initial data stay identical") {
  const TorusGrid g(16, kTwoPi);
  ExperimentConfig c = laminar_config();
  c.T_total = 1.0;
  const VectorField u0 = random_solenoidal_field(g, 4, c.initial_spec());
  const VectorField f = build_forcing(g, c.forcing_spec());
  const DecayReport report = run_twin_experiment(u0, u0, f, twin_params(c));
  CHECK(report.w0 == 0.0);
  CHECK(report.w_final == 0.0);
  CHECK(report.steps == 20);
  CHECK(report.history.size() == 21);
  CHECK_FALSE(report.fit.valid);
}

TEST_CASE("laminar twin run synchronizes faster than the viscous envelope") {
  const ExperimentConfig c = laminar_config();
  const DecayReport report = run_twin_experiment(c);
  MESSAGE("sigma " << report.fit.sigma << " envelope " << report.envelope << " Q in [" << report.min_q << ", "
                   << report.max_q << "]");
  CHECK(report.envelope == doctest::Approx(c.nu));
  CHECK(report.w0 > 0.0);
  CHECK(report.w0 <= report.w0_before);
  CHECK(report.max_enforcement_ratio <= 1.0);
  CHECK(report.saturated_steps == 0);
  REQUIRE(report.fit.valid);
  CHECK(report.fit.sigma >= report.envelope);
  CHECK(report.w_final <= std::exp(-0.5 * report.envelope * c.T_total) * report.w0);
}

TEST_CASE("twin runs reject inconsistent inputs") {
  const TorusGrid g(16, kTwoPi);
  const VectorField u(g);
  TwinParams p;
  p.dt = 0.0;
  CHECK_THROWS_AS(run_twin_experiment(u, u, u, p), std::invalid_argument);
  p.dt = 0.1;
  CHECK_THROWS_AS(run_twin_experiment(u, VectorField(TorusGrid(8, kTwoPi)), u, p), std::invalid_argument);
  p.record_every = 0;
  CHECK_THROWS_AS(run_twin_experiment(u, u, u, p), std::invalid_argument);
}

TEST_CASE("steady reference variant") {
  const TorusGrid g(16, kTwoPi);
  ExperimentConfig c = laminar_config();
  c.sync_mode = SyncMode::steady;
  c.T_total = 1.0;
  const VectorField f = build_forcing(g, c.forcing_spec());
  RelaxOptions relax;
  relax.dt = c.dt;
  const VectorField v = relax_to_steady(f, c.nu, c.steady_tol, relax);
  const TwinParams params = twin_params(c);

  const DecayReport same = run_steady_reference_experiment(v, v, f, params);
  CHECK(same.w0 == 0.0);
  CHECK(same.w_final == 0.0);

  const DyadicLevel lv = determining_wavenumber(v, c.r, c.c_r, c.nu);
  REQUIRE_FALSE(lv.saturated);
  REQUIRE(lv.q == 0);
  // A perturbation confined to the enforced band is removed at t = 0.
  VectorField low(g);
  low.set_mode(0, {0, 1, 0}, Complex(0.0, 1e-4));
  low = leray_project(std::move(low));
  const DecayReport wiped = run_steady_reference_experiment(v, v + low, f, params);
  CHECK(wiped.w0_before > 0.0);
  CHECK(wiped.w0 == 0.0);
  CHECK(wiped.w_final == 0.0);

  c.T_total = 10.0;
  const DecayReport decay = run_steady_reference_experiment(c);
  MESSAGE("steady sigma " << decay.fit.sigma << " Q in [" << decay.min_q << ", " << decay.max_q << "]");
  CHECK(decay.w0 > 0.0);
  CHECK(decay.max_growth <= 1.0);
  REQUIRE(decay.fit.valid);
  CHECK(decay.fit.sigma >= decay.envelope);
}

TEST_CASE("stricter thresholds enforce more modes and synchronize faster") {
  const TorusGrid g(16, kTwoPi);
  ExperimentConfig c = laminar_config();
  c.init_urms = 1e-3;
  c.forcing_amplitude = 1e-3;
  c.T_total = 4.0;
  const VectorField f = build_forcing(g, c.forcing_spec());
  const VectorField u0 = random_solenoidal_field(g, 11, c.initial_spec());
  const VectorField v0 = random_solenoidal_field(g, 12, c.initial_spec());
  double prev_sigma = 0.0;
  int prev_q = -1;
  for (double c_r : {0.4, 0.1, 0.07, 0.04}) {
    c.c_r = c_r;
    const DecayReport report = run_twin_experiment(u0, v0, f, twin_params(c));
    MESSAGE("c_r " << c_r << " sigma " << report.fit.sigma << " Q in [" << report.min_q << ", " << report.max_q
                   << "]");
    // Enforcing every mode synchronizes in one step: no finite rate to fit.
    REQUIRE((report.fit.valid || report.w_final == 0.0));
    const double sigma = report.fit.valid ? report.fit.sigma : std::numeric_limits<double>::infinity();
    CHECK(report.min_q >= prev_q);
    CHECK(sigma >= prev_sigma);
    prev_sigma = sigma;
    prev_q = report.min_q;
  }
}
