#include "detmodes/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "detmodes/diagnostics.hpp"
#include "detmodes/spectral.hpp"

namespace detmodes {

namespace {

// phi_k(z) for k = 1, 2, 3; Taylor series near the origin where the closed
// forms cancel catastrophically.
std::array<double, 3> phi_functions(double z) {
  if (std::abs(z) < 1.0) {
    std::array<double, 3> out{};
    for (int k = 1; k <= 3; ++k) {
      double term = 1.0;
      for (int j = 1; j <= k; ++j) term /= j;
      double sum = 0.0;
      for (int j = 0; j < 40; ++j) {
        sum += term;
        term *= z / (j + k + 1);
      }
      out[static_cast<std::size_t>(k - 1)] = sum;
    }
    return out;
  }
  const double ez = std::exp(z);
  const double p1 = (ez - 1.0) / z;
  const double p2 = (ez - 1.0 - z) / (z * z);
  const double p3 = (ez - 1.0 - z - 0.5 * z * z) / (z * z * z);
  return {p1, p2, p3};
}

void check_finite(const VectorField& u) {
  for (int c = 0; c < 3; ++c) {
    for (const Complex& v : u.component(c)) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw NonFiniteError("non-finite spectral coefficient");
      }
    }
  }
}

void clear_mean(VectorField& u) {
  for (int c = 0; c < 3; ++c) u.component(c)[0] = Complex{};
}

VectorField nonlinear_with_max(const VectorField& u, double* u_max) {
  const TorusGrid& g = u.grid();
  const PhysicalField up = inverse_transform(u);
  const PhysicalField wp = inverse_transform(curl(u));
  PhysicalField cross(g);
  double m2 = 0.0;
  for (std::size_t i = 0; i < g.physical_size(); ++i) {
    const double ux = up.data[0][i];
    const double uy = up.data[1][i];
    const double uz = up.data[2][i];
    const double wx = wp.data[0][i];
    const double wy = wp.data[1][i];
    const double wz = wp.data[2][i];
    cross.data[0][i] = uy * wz - uz * wy;
    cross.data[1][i] = uz * wx - ux * wz;
    cross.data[2][i] = ux * wy - uy * wx;
    m2 = std::max(m2, ux * ux + uy * uy + uz * uz);
  }
  for (const auto& comp : cross.data) {
    for (double v : comp) {
      if (!std::isfinite(v)) throw NonFiniteError("non-finite value in the nonlinear product");
    }
  }
  if (u_max) *u_max = std::sqrt(m2);
  VectorField out = leray_project(dealias(forward_transform(cross)));
  clear_mean(out);
  return out;
}

}  // namespace

std::string to_string(ForcingSpec::Kind kind) {
  switch (kind) {
    case ForcingSpec::Kind::none:
      return "none";
    case ForcingSpec::Kind::steady_low_mode:
      return "steady-low-mode";
    case ForcingSpec::Kind::custom:
      return "custom";
  }
  return "unknown";
}

ForcingSpec::Kind parse_forcing_kind(const std::string& name) {
  if (name == "none") return ForcingSpec::Kind::none;
  if (name == "steady-low-mode") return ForcingSpec::Kind::steady_low_mode;
  if (name == "custom") return ForcingSpec::Kind::custom;
  throw std::invalid_argument("forcing must be one of none, steady-low-mode, custom; got '" + name + "'");
}

VectorField build_forcing(const TorusGrid& grid, const ForcingSpec& spec) {
  if (!std::isfinite(spec.amplitude)) throw std::invalid_argument("forcing amplitude must be finite");
  VectorField f(grid);
  switch (spec.kind) {
    case ForcingSpec::Kind::none:
      break;
    case ForcingSpec::Kind::steady_low_mode: {
      // sin x cos y cos z = sum over the 8 sign patterns of (1/8)(-i) sx e^{i(sx x + sy y + sz z)}.
      for (int sx : {-1, 1}) {
        for (int sy : {-1, 1}) {
          for (int sz : {-1, 1}) {
            const Wavevector k{sx, sy, sz};
            f.set_mode(0, k, Complex(0.0, -0.125 * sx * spec.amplitude));
            f.set_mode(1, k, Complex(0.0, 0.125 * sy * spec.amplitude));
          }
        }
      }
      break;
    }
    case ForcingSpec::Kind::custom: {
      const int kmax = grid.k_max_dealias();
      for (const auto& mode : spec.modes) {
        const Wavevector& k = mode.k;
        if (k.norm2() == 0) throw std::invalid_argument("custom forcing: the k = 0 mode must vanish");
        if (std::abs(k.x) > kmax || std::abs(k.y) > kmax || std::abs(k.z) > kmax) {
          throw std::invalid_argument("custom forcing: mode outside the dealiased band");
        }
        for (int c = 0; c < 3; ++c) {
          const Complex a = mode.amplitude[static_cast<std::size_t>(c)];
          if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw std::invalid_argument("custom forcing: non-finite amplitude");
          }
          f.set_mode(c, k, spec.amplitude * a);
        }
      }
      break;
    }
  }
  return leray_project(std::move(f));
}

VectorField nonlinear_term(const VectorField& u) { return nonlinear_with_max(u, nullptr); }

Stepper::Stepper(const VectorField& forcing, double nu, double dt) : forcing_(forcing), nu_(nu), dt_(dt) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!is_zero_mean(forcing)) throw std::invalid_argument("forcing must have zero mean");
  const TorusGrid& g = forcing.grid();
  const double kappa0 = g.kappa0();
  table_.resize(static_cast<std::size_t>(g.max_band_k2() + 1));
  for (std::size_t k2 = 0; k2 < table_.size(); ++k2) {
    const double z = -nu * kappa0 * kappa0 * double(k2) * dt;
    const auto [p1, p2, p3] = phi_functions(z);
    const auto half = phi_functions(0.5 * z);
    table_[k2] = {std::exp(z),
                  std::exp(0.5 * z),
                  0.5 * dt * half[0],
                  dt * (p1 - 3.0 * p2 + 4.0 * p3),
                  dt * (p2 - 2.0 * p3),
                  dt * (-p2 + 4.0 * p3)};
  }
}

VectorField Stepper::rhs(const VectorField& u, double* u_max) const {
  VectorField n = nonlinear_with_max(u, u_max);
  n += forcing_;
  return n;
}

void Stepper::advance(SolverState& state) {
  const TorusGrid& g = state.u.grid();
  if (!(g == forcing_.grid())) throw std::invalid_argument("state and forcing grids differ");
  try {
    double u_max = 0.0;
    const VectorField& u = state.u;
    const VectorField nu0 = rhs(u, &u_max);
    const double cfl = dt_ * u_max / g.dx();
    max_cfl_ = std::max(max_cfl_, cfl);
    if (cfl > 0.5) ++cfl_violations_;

    const std::size_t size = g.spectral_size();
    auto coeff = [&](std::size_t i) -> const Coefficients& {
      return table_[static_cast<std::size_t>(g.k2(i))];
    };
    auto in_band = [&](std::size_t i) { return g.in_dealiased_band(i); };

    VectorField a(g);
    VectorField b(g);
    VectorField c(g);
    for (int d = 0; d < 3; ++d) {
      const auto uu = u.component(d);
      const auto n0 = nu0.component(d);
      auto ad = a.component(d);
      for (std::size_t i = 0; i < size; ++i) {
        if (!in_band(i)) continue;
        const auto& k = coeff(i);
        ad[i] = k.e2 * uu[i] + k.q * n0[i];
      }
    }
    const VectorField na = rhs(a, nullptr);
    for (int d = 0; d < 3; ++d) {
      const auto uu = u.component(d);
      const auto n1 = na.component(d);
      auto bd = b.component(d);
      for (std::size_t i = 0; i < size; ++i) {
        if (!in_band(i)) continue;
        const auto& k = coeff(i);
        bd[i] = k.e2 * uu[i] + k.q * n1[i];
      }
    }
    const VectorField nb = rhs(b, nullptr);
    for (int d = 0; d < 3; ++d) {
      const auto ad = a.component(d);
      const auto n0 = nu0.component(d);
      const auto n2 = nb.component(d);
      auto cd = c.component(d);
      for (std::size_t i = 0; i < size; ++i) {
        if (!in_band(i)) continue;
        const auto& k = coeff(i);
        cd[i] = k.e2 * ad[i] + k.q * (2.0 * n2[i] - n0[i]);
      }
    }
    const VectorField nc = rhs(c, nullptr);

    VectorField next(g);
    for (int d = 0; d < 3; ++d) {
      const auto uu = u.component(d);
      const auto n0 = nu0.component(d);
      const auto n1 = na.component(d);
      const auto n2 = nb.component(d);
      const auto n3 = nc.component(d);
      auto out = next.component(d);
      for (std::size_t i = 0; i < size; ++i) {
        if (!in_band(i)) continue;
        const auto& k = coeff(i);
        out[i] = k.e * uu[i] + k.f1 * n0[i] + 2.0 * k.f2 * (n1[i] + n2[i]) + k.f3 * n3[i];
      }
    }
    check_finite(next);
    next = leray_project(std::move(next));
    clear_mean(next);
    state.u = std::move(next);
    state.t += dt_;
    ++state.step;
  } catch (const NonFiniteError& e) {
    std::ostringstream msg;
    msg << "solution diverged at step " << state.step + 1 << " (t = " << state.t + dt_ << "): " << e.what();
    throw DivergenceError(msg.str(), state);
  }
}

void Stepper::advance_to(SolverState& state, double t_end) {
  while (state.t < t_end - 0.5 * dt_) advance(state);
}

EnergyBudget energy_budget(const VectorField& u, const VectorField& forcing, double nu) {
  EnergyBudget b;
  b.energy = 0.5 * inner_product(u, u);
  b.enstrophy = gradient_norm2(u);
  b.dissipation = nu * b.enstrophy;
  b.injection = inner_product(forcing, u);
  return b;
}

VectorField stokes_solution(const VectorField& forcing, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  const TorusGrid& g = forcing.grid();
  const double kappa0 = g.kappa0();
  VectorField u(g);
  for (int c = 0; c < 3; ++c) {
    const auto f = forcing.component(c);
    auto out = u.component(c);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const int k2 = g.k2(i);
      if (k2 != 0) out[i] = f[i] / (nu * kappa0 * kappa0 * k2);
    }
  }
  u.mark_divergence_free(forcing.divergence_free());
  return u;
}

VectorField relax_to_steady(const VectorField& forcing, double nu, double tol, const RelaxOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("relax_to_steady: tol must be positive");
  if (!(options.check_interval > 0.0)) throw std::invalid_argument("relax_to_steady: check interval must be positive");
  const TorusGrid& g = forcing.grid();
  if (inner_product(forcing, forcing) == 0.0) {
    VectorField zero(g);
    zero.mark_divergence_free(true);
    return zero;
  }
  const double G = grashof(forcing, nu);
  if (G > 1.0 && options.log) {
    *options.log << "warning: relaxing to a steady state at Grashof number " << G
                 << " > 1; the steady state may be unstable\n";
  }

  Stepper stepper(forcing, nu, options.dt);
  SolverState state(leray_project(stokes_solution(forcing, nu)));
  const auto steps_per_check =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(options.check_interval / options.dt)));
  const double span = double(steps_per_check) * options.dt;
  const double lambda0 = g.lambda0();
  std::vector<double> residuals;
  while (state.step < options.max_steps) {
    const VectorField before = state.u;
    for (std::uint64_t s = 0; s < steps_per_check; ++s) stepper.advance(state);
    const double change = std::sqrt(inner_product(state.u - before, state.u - before)) / span;
    const double size = std::sqrt(inner_product(state.u, state.u));
    const double residual = change / (nu * lambda0 * lambda0 * size);
    residuals.push_back(residual);
    if (residual <= tol) return state.u;
  }
  std::ostringstream msg;
  msg << "relax_to_steady: no convergence within " << options.max_steps << " steps; last residual "
      << (residuals.empty() ? 0.0 : residuals.back()) << " > tol " << tol;
  throw RelaxationError(msg.str(), std::move(residuals));
}

}  // namespace detmodes
