#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace detmodes {

/// Integer wavevector k in Z^3.
struct Wavevector {
  int x = 0;
  int y = 0;
  int z = 0;

  int norm2() const { return x * x + y * y + z * z; }
  friend bool operator==(const Wavevector&, const Wavevector&) = default;
};

/// Uniform discretization of the periodic cube [0, L)^3.
///
/// Physical samples are stored x-fastest: index (iz * N + iy) * N + ix.
/// Spectral coefficients use the real-to-complex half layout: index
/// (iz * N + iy) * (N/2 + 1) + kx with kx in [0, N/2]; ky and kz are stored
/// in FFT order, so row i holds the signed wavenumber i < N/2 ? i : i - N.
/// Coefficients with kx < 0 are implied by Hermitian symmetry.
class TorusGrid {
 public:
  TorusGrid(int n, double length);

  int n() const { return n_; }
  double length() const { return length_; }
  int half() const { return n_ / 2 + 1; }

  /// 2/3-rule cutoff, floor(N/3).
  int k_max_dealias() const { return n_ / 3; }

  std::size_t physical_size() const;
  std::size_t spectral_size() const;

  double dx() const { return length_ / n_; }
  /// lambda_0 = 1/L.
  double lambda0() const { return 1.0 / length_; }
  /// kappa_0 = 2 pi / L.
  double kappa0() const;

  int signed_wavenumber(int row) const { return row < n_ / 2 ? row : row - n_; }
  Wavevector wavevector(std::size_t spectral_index) const { return modes_->k[spectral_index]; }

  /// Storage index of k; requires k.x in [0, N/2] and k.y, k.z in [-N/2, N/2).
  std::size_t spectral_index(const Wavevector& k) const;

  /// Precomputed |k|^2 per spectral index.
  int k2(std::size_t spectral_index) const { return modes_->k2[spectral_index]; }
  /// Multiplicity of a stored coefficient in the full spectrum (1 on the
  /// kx = 0 and kx = N/2 planes, 2 elsewhere).
  double hermitian_weight(std::size_t spectral_index) const { return modes_->weight[spectral_index]; }
  /// True when every component of k lies inside the 2/3-rule band.
  bool in_dealiased_band(std::size_t spectral_index) const { return modes_->in_band[spectral_index] != 0; }

  /// Largest |k|^2 present in the dealiased band.
  int max_band_k2() const { return 3 * k_max_dealias() * k_max_dealias(); }

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  struct ModeTable {
    std::vector<Wavevector> k;
    std::vector<int> k2;
    std::vector<double> weight;
    std::vector<unsigned char> in_band;
  };

  int n_;
  double length_;
  std::shared_ptr<const ModeTable> modes_;
};

}  // namespace detmodes
