#pragma once

// Transforms, projections and norms on the periodic cube.

#include <cstdint>
#include <limits>

#include "detmodes/field.hpp"

namespace detmodes {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Physical samples -> normalized coefficients u_hat(k) = N^-3 sum_x u(x) e^{-i 2 pi k.x / L}.
/// Throws std::invalid_argument on non-finite samples.
VectorField forward_transform(const PhysicalField& samples);

PhysicalField inverse_transform(const VectorField& u);

/// Trigonometric interpolation of u onto an m^3 grid (m >= N, even).
/// Nyquist coefficients are split symmetrically so the interpolant is real.
PhysicalField interpolate(const VectorField& u, int m);

/// u_hat(k) <- (I - k k^T / |k|^2) u_hat(k). Nyquist modes have no
/// well-defined direction and are removed.
VectorField leray_project(VectorField u);

/// Zeroes every coefficient with some |k_i| > floor(N/3).
VectorField dealias(VectorField u);

bool is_zero_mean(const VectorField& u);

/// max_k |k . u_hat(k)| / max_k |k| |u_hat(k)|; 0 for the zero field.
double divergence_residual(const VectorField& u);

/// (integral |u|^r dx)^{1/r} with |.| the Euclidean vector magnitude.
/// r = 2 uses Parseval; r = infinity is the maximum over the native grid;
/// other r use the rectangle rule on the 2N-point trigonometric interpolant.
/// Throws std::invalid_argument for r < 1.
double lebesgue_norm(const VectorField& u, double r);

/// Rectangle-rule L^r norm of samples (r = infinity gives the sample maximum).
double lebesgue_norm(const PhysicalField& samples, double r);

/// (sum_{k != 0} |2 pi k / L|^{2s} |u_hat(k)|^2 L^3)^{1/2}.
/// Throws std::invalid_argument when s < 0 and u_hat(0) != 0.
double sobolev_norm(const VectorField& u, double s);

/// L^2 inner product (u, v) = L^3 sum_k u_hat(k) . conj(v_hat(k)).
double inner_product(const VectorField& u, const VectorField& v);

/// ||grad u||_2^2.
double gradient_norm2(const VectorField& u);

/// Componentwise spectral derivative d/dx_axis.
VectorField partial_derivative(const VectorField& u, int axis);

VectorField curl(const VectorField& u);

struct RandomFieldSpec {
  /// Peak parameter of the shell spectrum E(k) ~ k^4 exp(-k^2 / k0^2), in integer wavenumber units.
  double k0 = 2.0;
  /// Target per-component rms velocity sqrt(<|u|^2> / 3).
  double u_rms = 1.0;
};

/// Seeded random divergence-free, zero-mean, dealiased field. Each mode's
/// random draw depends only on (seed, k), so the same seed yields the same
/// low modes on every resolution.
VectorField random_solenoidal_field(const TorusGrid& grid, std::uint64_t seed, const RandomFieldSpec& spec = {});

}  // namespace detmodes
