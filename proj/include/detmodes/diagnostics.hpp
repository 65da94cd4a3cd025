#pragma once

// Determining and dissipation wavenumbers, local Reynolds numbers, Grashof
// number, intermittency dimension, Kolmogorov wavenumber and the averaged
// bound reports built from them.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detmodes/field.hpp"

namespace detmodes {

/// lambda_Q together with its shell index. `saturated` marks a value the grid
/// cannot resolve; for the determining wavenumber Q is then the sentinel q_max + 1.
struct DyadicLevel {
  double lambda = 0.0;
  int q = 0;
  bool saturated = false;
};

/// Lambda_{u,r}: the smallest lambda_q, q in [0, q_max], with
///   lambda_p^{-1+3/r} ||u_p||_r < c_r nu  for all p > q   and
///   lambda_q^{-1} ||u_{<=q}||_inf < c_r nu.
/// Shells above q_max vanish, so the high-mode condition is only checked up
/// to q_max. Throws std::invalid_argument unless r lies in (2, 3).
DyadicLevel determining_wavenumber(const VectorField& u, double r, double c_r, double nu);

/// Lambda^dis: the smallest lambda_q with lambda_p^{-1} ||u_p||_inf < c0 nu
/// for all p > q. Flagged saturated when the top resolved shell fails.
DyadicLevel dissipation_wavenumber(const VectorField& u, double c0, double nu);

/// R^h_q = ||u_q||_inf / (lambda_q nu) and R^l_q = ||u_{<=q}||_inf / (lambda_q nu), q = 0..q_max.
struct ReynoldsProfiles {
  std::vector<double> high;
  std::vector<double> low;
};
ReynoldsProfiles reynolds_profiles(const VectorField& u, double nu);

/// G = ||f||_{H^-1} / (nu^2 kappa0^{1/2}), kappa0 = 2 pi / L.
double grashof(const VectorField& f, double nu);

/// Trapezoidal time average over possibly nonuniform sample times.
double time_average(std::span<const double> t, std::span<const double> values);

/// eps = nu lambda0^d <||grad u||_2^2>.
double energy_dissipation_rate(std::span<const double> t, std::span<const double> enstrophy, double nu,
                               double d, double length);

/// kappa_d = (eps / nu^3)^{1/(d+1)}.
double kolmogorov_wavenumber(double eps, double nu, double d);

/// Per-snapshot inputs to the intermittency estimator; shell vectors are indexed by q = 0..q_max.
struct ShellSeriesSample {
  double t = 0.0;
  int big_q = 0;
  std::vector<double> lr;
  std::vector<double> l2;
};

struct IntermittencyEstimate {
  double d = 0.0;
  /// LHS / RHS of the defining inequality at the returned d.
  double constant = 0.0;
};

/// Largest d in [0, 3] with
///   < sum_{q<=Q} lambda_q^{-1+6/r+d(1-2/r)} ||u_q||_r^2 >  <=  lambda0^{d(1-2/r)} < sum_{q<=Q} lambda_q^2 ||u_q||_2^2 >
/// (implied constant 1), resolved by bisection to 1e-4. The left/right ratio
/// is nondecreasing in d, so the feasible set is an interval [0, d*].
/// Returns 0 with the measured constant when even d = 0 fails.
IntermittencyEstimate intermittency_dimension(std::span<const ShellSeriesSample> series, double r,
                                              double length);

struct DiagnosticParams {
  double nu = 1.0;
  double r = 2.5;
  double c_r = 0.05;
  double c0 = 0.05;
};

struct WavenumberRecord {
  double t = 0.0;
  double lambda = 0.0;
  int q = 0;
  bool saturated = false;
  double lambda_dis = 0.0;
  int q_dis = 0;
  bool dis_saturated = false;
  double enstrophy = 0.0;
  double energy = 0.0;
  std::vector<double> rh;
  std::vector<double> rl;
  /// ||u_q||_r and ||u_q||_2 for q = 0..q_max.
  std::vector<double> shell_lr;
  std::vector<double> shell_l2;
};

WavenumberRecord analyze_field(const VectorField& u, double t, const DiagnosticParams& params);

struct AveragedDiagnostics {
  double window = 0.0;
  double lambda0 = 0.0;
  double mean_lambda = 0.0;
  /// <(Lambda - lambda0) 1_{Lambda > lambda0}>, equal to <Lambda> - lambda0.
  double mean_lambda_excess = 0.0;
  /// <1_{Lambda > lambda0} Lambda>, the literal conditional average.
  double mean_lambda_indicator = 0.0;
  double mean_enstrophy = 0.0;
  double eps = 0.0;
  double kappa_d = 0.0;
  double d = 0.0;
  double d_constant = 0.0;
  bool d_overridden = false;
  double grashof = 0.0;
  int n_used = 0;
  int n_saturated = 0;
};

/// Time averages over the non-saturated records. `d_override` replaces the
/// estimated intermittency dimension.
AveragedDiagnostics average_diagnostics(std::span<const WavenumberRecord> records, const DiagnosticParams& params,
                                        double length, double grashof_number,
                                        std::optional<double> d_override = std::nullopt);

struct BoundRow {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  /// Largest Lambda nu^2 / ||grad u||^2 over the non-saturated records.
  double max_pointwise_ratio = 0.0;
  bool all_finite = true;
};

BoundReport bound_reports(std::span<const WavenumberRecord> records, const AveragedDiagnostics& averaged,
                          const DiagnosticParams& params);

/// Largest ||u_q||_inf / (lambda_q^{3/r} ||u_q||_r) over the shell kernels
/// (dealiased delta projected onto each shell q = 0..q_max).
double bernstein_constant(const TorusGrid& grid, double r);

/// c0 = C_B(r) c_r, which makes Lambda_{u,r} >= Lambda^dis hold whenever each
/// shell's Bernstein ratio stays below the kernel value.
double calibrated_c0(const TorusGrid& grid, double r, double c_r);

}  // namespace detmodes
