#include "detmodes/field.hpp"

#include <stdexcept>

namespace detmodes {

namespace {

// Wraps a signed wavenumber into [-N/2, N/2).
int wrap(int k, int n) {
  k %= n;
  if (k < -n / 2) k += n;
  if (k >= n / 2) k -= n;
  return k;
}

}  // namespace

PhysicalField::PhysicalField(TorusGrid g) : grid(std::move(g)) {
  for (auto& c : data) c.assign(grid.physical_size(), 0.0);
}

double& PhysicalField::at(int component, int ix, int iy, int iz) {
  const auto n = static_cast<std::size_t>(grid.n());
  return data[component][(iz * n + iy) * n + ix];
}

double PhysicalField::at(int component, int ix, int iy, int iz) const {
  const auto n = static_cast<std::size_t>(grid.n());
  return data[component][(iz * n + iy) * n + ix];
}

VectorField::VectorField(TorusGrid grid) : grid_(std::move(grid)) {
  for (auto& c : coeffs_) c.assign(grid_.spectral_size(), Complex{});
}

Complex VectorField::coefficient(int c, const Wavevector& k) const {
  const int n = grid_.n();
  Wavevector w{wrap(k.x, n), wrap(k.y, n), wrap(k.z, n)};
  if (w.x == -n / 2) w.x = n / 2;
  if (w.x >= 0) return coeffs_[c][grid_.spectral_index(w)];
  const Wavevector m{-w.x, wrap(-w.y, n), wrap(-w.z, n)};
  return std::conj(coeffs_[c][grid_.spectral_index(m)]);
}

void VectorField::set_mode(int c, const Wavevector& k, Complex value) {
  const int n = grid_.n();
  Wavevector w{wrap(k.x, n), wrap(k.y, n), wrap(k.z, n)};
  if (w.x == -n / 2) w.x = n / 2;
  if (w.x < 0) {
    w = {-w.x, wrap(-w.y, n), wrap(-w.z, n)};
    value = std::conj(value);
  }
  const std::size_t idx = grid_.spectral_index(w);
  if (w.x == 0 || w.x == n / 2) {
    // The partner -k lives in the same stored plane.
    const Wavevector m{w.x, wrap(-w.y, n), wrap(-w.z, n)};
    const std::size_t midx = grid_.spectral_index(m);
    if (midx == idx) {
      coeffs_[c][idx] = Complex(value.real(), 0.0);
      return;
    }
    coeffs_[c][midx] = std::conj(value);
  }
  coeffs_[c][idx] = value;
}

VectorField& VectorField::operator+=(const VectorField& other) {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("field grids differ");
  for (int c = 0; c < 3; ++c) {
    auto& a = coeffs_[c];
    const auto& b = other.coeffs_[c];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  }
  divergence_free_ = divergence_free_ && other.divergence_free_;
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("field grids differ");
  for (int c = 0; c < 3; ++c) {
    auto& a = coeffs_[c];
    const auto& b = other.coeffs_[c];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  }
  divergence_free_ = divergence_free_ && other.divergence_free_;
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& comp : coeffs_) {
    for (auto& v : comp) v *= s;
  }
  return *this;
}

}  // namespace detmodes
