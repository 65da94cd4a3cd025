#pragma once

// Smooth dyadic partition of unity and the shell projections built on it.
//
// chi is radial with chi = 1 on [0, 3/4] and chi = 0 on [1, inf); the shell
// multipliers are phi_q(k) = chi(2^{-q-1}|k|) - chi(2^{-q}|k|) for q >= 0 and
// phi_{-1}(k) = chi(|k|), evaluated at the integer wavevector magnitude |k|.
// Shell q is supported on 3/4 * 2^q < |k| < 2^{q+1}, and the partial sum
// u_{<=Q} carries the multiplier chi(2^{-(Q+1)}|k|).

#include <map>
#include <vector>

#include "detmodes/field.hpp"

namespace detmodes {

struct DyadicMultiplier {
  static constexpr int q_min = -1;

  /// C-infinity cutoff: 1 for xi <= 3/4, 0 for xi >= 1, built from exp(-1/t).
  static double chi(double xi);
  /// phi(xi) = chi(xi/2) - chi(xi).
  static double phi(double xi);
  /// phi_q evaluated at a wavevector magnitude.
  static double shell(int q, double k_magnitude);
  /// sum_{p <= q} phi_p evaluated at a wavevector magnitude.
  static double below(int q, double k_magnitude);

  /// Largest shell index meeting the dealiased band of `grid`; all higher
  /// shells of a dealiased field vanish identically.
  static int q_max(const TorusGrid& grid);
};

/// lambda_q = 2^q / L.
double dyadic_wavenumber(int q, double length);

/// u_q: coefficientwise multiplication by phi_q(|k|).
VectorField project_shell(const VectorField& u, int q);

/// u_{<=Q} = sum_{q=-1}^{Q} u_q.
VectorField project_below(const VectorField& u, int big_q);

/// Per-shell norms indexed by q in [-1, q_max]; shells above q_max read as 0.
class ShellNorms {
 public:
  ShellNorms(int q_max, std::vector<double> values) : q_max_(q_max), values_(std::move(values)) {}

  int q_max() const { return q_max_; }
  double at(int q) const;
  const std::vector<double>& values() const { return values_; }

 private:
  int q_max_;
  std::vector<double> values_;
};

/// All shells u_{-1} ... u_{q_max} of one field, with a write-once norm cache.
class ShellDecomposition {
 public:
  explicit ShellDecomposition(const VectorField& u);

  int q_max() const { return q_max_; }
  const VectorField& shell(int q) const { return shells_.at(q + 1); }
  VectorField reconstruct() const;

  /// ||u_q||_r, computed on first request and cached per (q, r).
  double norm(int q, double r);

 private:
  int q_max_;
  std::vector<VectorField> shells_;
  std::map<std::pair<int, double>, double> norm_cache_;
};

/// q -> ||u_q||_r for q in [-1, q_max]. Requires r in (1, infinity].
ShellNorms shell_norms(const VectorField& u, double r);

/// ||u_q||_r / (lambda_q^{3(1/s - 1/r)} ||u_q||_s). Requires r >= s >= 1;
/// throws std::domain_error when ||u_q||_s = 0.
double bernstein_ratio(const VectorField& u_q, int q, double s, double r);

/// max over |k|^2 in the dealiased band of |sum_{q=-1}^{q_max} phi_q(|k|) - 1|
/// and |chi(2^{-q_max-1}|k|) - 1|.
double partition_of_unity_error(const TorusGrid& grid);

}  // namespace detmodes
