#pragma once

// Pseudo-spectral integration of the forced incompressible Navier-Stokes
// equations u_t + (u.grad)u - nu Lap u + grad p = f on the periodic cube.

#include <array>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "detmodes/field.hpp"

namespace detmodes {

struct ForcingSpec {
  enum class Kind { none, steady_low_mode, custom };

  struct Mode {
    Wavevector k;
    std::array<Complex, 3> amplitude;
    friend bool operator==(const Mode&, const Mode&) = default;
  };

  Kind kind = Kind::steady_low_mode;
  /// Overall scale applied to the forcing pattern.
  double amplitude = 1.0;
  /// Active modes for Kind::custom; the conjugate partners are implied.
  std::vector<Mode> modes;
};

std::string to_string(ForcingSpec::Kind kind);
/// Accepts "none", "steady-low-mode" and "custom".
ForcingSpec::Kind parse_forcing_kind(const std::string& name);

/// Spectral forcing field. steady_low_mode is the 3D Taylor-Green pattern
///   f = A (sin x cos y cos z, -cos x sin y cos z, 0),  x -> 2 pi x / L,
/// supported on |k| = sqrt(3). Custom modes are Leray-projected; modes
/// outside the dealiased band are rejected.
VectorField build_forcing(const TorusGrid& grid, const ForcingSpec& spec);

/// Raised when a transform meets a non-finite value.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// -P[(u.grad)u], evaluated as P[u x curl u] with products in physical space
/// and the result dealiased. The gradient part of (u.grad)u drops out under P.
VectorField nonlinear_term(const VectorField& u);

struct SolverState {
  explicit SolverState(VectorField field, double time = 0.0, std::uint64_t steps = 0)
      : t(time), u(std::move(field)), step(steps) {}

  double t;
  VectorField u;
  std::uint64_t step;
};

/// Thrown when a step produces non-finite coefficients; carries the state
/// before the failed step.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, SolverState last_good)
      : std::runtime_error(what), last_good_(std::move(last_good)) {}
  const SolverState& last_good() const { return last_good_; }

 private:
  SolverState last_good_;
};

/// Fourth-order exponential time differencing (Cox-Matthews ETDRK4) with the
/// viscous factor exp(-nu |2 pi k / L|^2 dt) applied exactly and the
/// nonlinearity plus forcing treated explicitly.
class Stepper {
 public:
  Stepper(const VectorField& forcing, double nu, double dt);

  double nu() const { return nu_; }
  double dt() const { return dt_; }
  const VectorField& forcing() const { return forcing_; }

  /// Advances by one step. A step with dt > 0.5 dx / ||u||_inf is taken but
  /// counted in cfl_violations(). Throws DivergenceError on NaN or Inf.
  void advance(SolverState& state);

  /// Advances until state.t reaches t_end to within half a step.
  void advance_to(SolverState& state, double t_end);

  std::uint64_t cfl_violations() const { return cfl_violations_; }
  /// Largest dt * ||u||_inf / dx seen so far.
  double max_cfl() const { return max_cfl_; }

 private:
  struct Coefficients {
    double e;
    double e2;
    double q;
    double f1;
    double f2;
    double f3;
  };

  VectorField rhs(const VectorField& u, double* u_max) const;

  VectorField forcing_;
  double nu_;
  double dt_;
  std::vector<Coefficients> table_;
  std::uint64_t cfl_violations_ = 0;
  double max_cfl_ = 0.0;
};

struct EnergyBudget {
  /// 1/2 ||u||_2^2.
  double energy = 0.0;
  /// ||grad u||_2^2.
  double enstrophy = 0.0;
  /// nu ||grad u||_2^2.
  double dissipation = 0.0;
  /// (f, u).
  double injection = 0.0;
};

EnergyBudget energy_budget(const VectorField& u, const VectorField& forcing, double nu);

/// Stokes solution u_hat(k) = f_hat(k) / (nu |2 pi k / L|^2).
VectorField stokes_solution(const VectorField& forcing, double nu);

struct RelaxOptions {
  double dt = 0.05;
  /// Residual checks are made every `check_interval` of simulated time.
  double check_interval = 1.0;
  std::uint64_t max_steps = 200000;
  /// Receives warnings (large Grashof number); may be null.
  std::ostream* log = nullptr;
};

class RelaxationError : public std::runtime_error {
 public:
  RelaxationError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  /// Normalized residual ||u(t + D) - u(t)||_2 / (D nu lambda0^2 ||u||_2) at each check.
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Time-marches from the Stokes solution until
///   ||u(t + D) - u(t)||_2 / D <= tol nu lambda0^2 ||u||_2.
VectorField relax_to_steady(const VectorField& forcing, double nu, double tol, const RelaxOptions& options = {});

}  // namespace detmodes
