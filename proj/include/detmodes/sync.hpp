#pragma once

// Twin experiments: two solutions whose low modes are forced to agree after
// every step, and the decay of their difference w = u - v.

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "detmodes/config.hpp"
#include "detmodes/diagnostics.hpp"
#include "detmodes/field.hpp"

namespace detmodes {

/// Returns v with v_hat(k) replaced by u_hat(k) for every |k| < 2^{Q+1}.
/// Q >= q_max yields a full copy of u. Copied coefficients are not
/// reprojected, so they match u bit for bit.
VectorField enforce_low_mode_equality(const VectorField& u, const VectorField& v, int big_q);

struct WNormSample {
  double t = 0.0;
  double w_l2 = 0.0;
  double w_h1 = 0.0;
  /// Enforced shell index.
  int q = 0;
  double lambda_u = 0.0;
  double lambda_v = 0.0;
  bool saturated = false;
};

struct DecayFit {
  bool valid = false;
  /// ||w||_2^2 ~ exp(intercept - sigma t) over [t_start, t_end].
  double sigma = 0.0;
  double intercept = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  int points = 0;
};

/// Log-linear least squares on ||w||_2^2. Samples at or below
/// floor_fraction * ||w(t0)||_2 are roundoff; the fit uses the stretch of
/// the history above that floor, minus its first `transient_fraction`.
DecayFit fit_decay_rate(const std::vector<WNormSample>& history, double transient_fraction = 0.1,
                        double floor_fraction = 1e-12);

struct TwinParams {
  double dt = 0.01;
  double t_total = 1.0;
  DiagnosticParams diagnostics;
  /// Record every `record_every` steps (the first and last step are always recorded).
  int record_every = 1;
  std::ostream* log = nullptr;
};

struct DecayReport {
  std::vector<WNormSample> history;
  DecayFit fit;
  /// nu kappa0^2, the rate of the exponential envelope on ||w||_2^2.
  double envelope = 0.0;
  double c_r = 0.0;
  double r = 0.0;
  /// ||w||_2 before and after the enforcement at t = 0.
  double w0_before = 0.0;
  double w0 = 0.0;
  double w_final = 0.0;
  /// Largest ||w(t)||_2 / ||w(0+)||_2 over the recorded history.
  double max_growth = 0.0;
  /// Largest ||w||_2 after / before over all enforcements (at most 1).
  double max_enforcement_ratio = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t saturated_steps = 0;
  std::uint64_t cfl_violations = 0;
  int min_q = 0;
  int max_q = 0;
};

/// Advances u and v together, enforcing equality of their modes below
/// 2^{Q+1} with lambda_Q = max(Lambda_u, Lambda_v) after every step.
/// Saturation of either wavenumber falls back to a full copy.
DecayReport run_twin_experiment(const VectorField& u0, const VectorField& v0, const VectorField& forcing,
                                const TwinParams& params);

/// v is a steady state held fixed; u evolves and receives v's modes below
/// 2^{Q+1} with Q from Lambda_v alone.
DecayReport run_steady_reference_experiment(const VectorField& v_steady, const VectorField& u0,
                                            const VectorField& forcing, const TwinParams& params);

/// Keeps only the modes with |k| >= 2^{Q+1}.
VectorField high_pass(const VectorField& u, int big_q);

/// Builds fields, forcing and parameters from a config: u0 and v0 are
/// random fields from seed_u and seed_v.
DecayReport run_twin_experiment(const ExperimentConfig& config);

/// v = relax_to_steady(f), u0 = v + a random perturbation (seed_u, rms
/// perturbation_urms) above the enforced band of v.
DecayReport run_steady_reference_experiment(const ExperimentConfig& config);

TwinParams twin_params(const ExperimentConfig& config, std::ostream* log = nullptr);

}  // namespace detmodes
