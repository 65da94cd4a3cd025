#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "detmodes/grid.hpp"

namespace detmodes {

using Complex = std::complex<double>;

/// Real samples of a vector field on the N^3 grid, component-major, x-fastest.
struct PhysicalField {
  explicit PhysicalField(TorusGrid g);

  TorusGrid grid;
  std::array<std::vector<double>, 3> data;

  double& at(int component, int ix, int iy, int iz);
  double at(int component, int ix, int iy, int iz) const;
};

/// Real vector field held by its Fourier coefficients
///   u(x) = sum_k u_hat(k) exp(i 2 pi k.x / L),
/// stored in the half-spectrum layout of TorusGrid.
class VectorField {
 public:
  explicit VectorField(TorusGrid grid);

  const TorusGrid& grid() const { return grid_; }

  std::span<Complex> component(int c) { return coeffs_[c]; }
  std::span<const Complex> component(int c) const { return coeffs_[c]; }

  /// Coefficient of any k with components in [-N/2, N/2); negative kx is
  /// resolved through u_hat(-k) = conj(u_hat(k)).
  Complex coefficient(int c, const Wavevector& k) const;

  /// Sets u_hat(k) and its Hermitian partner u_hat(-k) so the field stays real.
  void set_mode(int c, const Wavevector& k, Complex value);

  /// Set by operations that guarantee k . u_hat(k) = 0.
  bool divergence_free() const { return divergence_free_; }
  void mark_divergence_free(bool flag) { divergence_free_ = flag; }

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double s);

  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(VectorField a, double s) { return a *= s; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }

  /// Bitwise equality of all stored coefficients.
  friend bool operator==(const VectorField& a, const VectorField& b) {
    return a.grid_ == b.grid_ && a.coeffs_ == b.coeffs_;
  }

 private:
  TorusGrid grid_;
  std::array<std::vector<Complex>, 3> coeffs_;
  bool divergence_free_ = false;
};

}  // namespace detmodes
