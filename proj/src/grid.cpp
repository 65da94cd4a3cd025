#include "detmodes/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace detmodes {

TorusGrid::TorusGrid(int n, double length) : n_(n), length_(length) {
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("grid resolution N must be even and >= 8, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("torus side length L must be positive and finite");
  }
  // Mode tables depend only on N, so grids of equal resolution share one.
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const ModeTable>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) {
    modes_ = it->second;
    return;
  }
  auto build = [](int m) {
    ModeTable t;
    const int h = m / 2 + 1;
    const int kmax = m / 3;
    const std::size_t size = static_cast<std::size_t>(m) * m * h;
    t.k2.resize(size);
    t.weight.resize(size);
    t.in_band.resize(size);
    t.k.resize(size);
    std::size_t idx = 0;
    for (int iz = 0; iz < m; ++iz) {
      const int kz = iz < m / 2 ? iz : iz - m;
      for (int iy = 0; iy < m; ++iy) {
        const int ky = iy < m / 2 ? iy : iy - m;
        for (int kx = 0; kx < h; ++kx, ++idx) {
          t.k[idx] = {kx, ky, kz};
          t.k2[idx] = kx * kx + ky * ky + kz * kz;
          t.weight[idx] = (kx == 0 || kx == m / 2) ? 1.0 : 2.0;
          t.in_band[idx] = (kx <= kmax && std::abs(ky) <= kmax && std::abs(kz) <= kmax) ? 1 : 0;
        }
      }
    }
    return t;
  };
  modes_ = cache.emplace(n, std::make_shared<const ModeTable>(build(n))).first->second;
}

std::size_t TorusGrid::physical_size() const {
  return static_cast<std::size_t>(n_) * n_ * n_;
}

std::size_t TorusGrid::spectral_size() const {
  return static_cast<std::size_t>(n_) * n_ * half();
}

double TorusGrid::kappa0() const { return 2.0 * std::numbers::pi / length_; }

std::size_t TorusGrid::spectral_index(const Wavevector& k) const {
  const int iy = k.y < 0 ? k.y + n_ : k.y;
  const int iz = k.z < 0 ? k.z + n_ : k.z;
  return (static_cast<std::size_t>(iz) * n_ + iy) * half() + k.x;
}

}  // namespace detmodes
