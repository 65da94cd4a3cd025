#include "detmodes/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace detmodes {

namespace {

bool is_nyquist(const TorusGrid& g, const Wavevector& k) {
  const int h = g.n() / 2;
  return k.x == h || k.y == -h || k.z == -h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mode_seed(std::uint64_t seed, const Wavevector& k) {
  std::uint64_t h = splitmix64(seed);
  for (int c : {k.x, k.y, k.z}) {
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
  }
  return h;
}

// One representative of each {k, -k} pair draws the random numbers.
bool canonical(const Wavevector& k) {
  return k.x > 0 || (k.x == 0 && (k.y > 0 || (k.y == 0 && k.z > 0)));
}

}  // namespace

VectorField forward_transform(const PhysicalField& samples) {
  const TorusGrid& g = samples.grid;
  for (const auto& comp : samples.data) {
    for (double v : comp) {
      if (!std::isfinite(v)) throw std::invalid_argument("forward_transform: non-finite sample");
    }
  }
  VectorField u(g);
  auto& engine = detail::fft_engine(g.n());
  const double scale = 1.0 / static_cast<double>(g.physical_size());
  for (int c = 0; c < 3; ++c) {
    auto out = u.component(c);
    engine.forward(samples.data[c], out);
    for (auto& v : out) v *= scale;
  }
  return u;
}

PhysicalField inverse_transform(const VectorField& u) {
  PhysicalField p(u.grid());
  auto& engine = detail::fft_engine(u.grid().n());
  for (int c = 0; c < 3; ++c) engine.backward(u.component(c), p.data[c]);
  return p;
}

PhysicalField interpolate(const VectorField& u, int m) {
  const TorusGrid& g = u.grid();
  const int n = g.n();
  if (m == n) return inverse_transform(u);
  if (m < n || m % 2 != 0) throw std::invalid_argument("interpolate: target size must be even and >= N");

  const TorusGrid fine(m, g.length());
  const int half_n = n / 2;
  const std::size_t mh = static_cast<std::size_t>(m / 2 + 1);
  auto fine_row = [m](int k) { return k < 0 ? k + m : k; };

  PhysicalField out(fine);
  std::vector<Complex> padded(fine.spectral_size());
  auto& engine = detail::fft_engine(m);
  for (int c = 0; c < 3; ++c) {
    std::fill(padded.begin(), padded.end(), Complex{});
    const auto src = u.component(c);
    for (std::size_t i = 0; i < src.size(); ++i) {
      const Complex value = src[i];
      if (value == Complex{}) continue;
      const Wavevector k = g.wavevector(i);
      double factor = 1.0;
      int ys[2] = {k.y, k.y};
      int zs[2] = {k.z, k.z};
      int ny = 1;
      int nz = 1;
      if (k.x == half_n) factor *= 0.5;
      if (k.y == -half_n) {
        factor *= 0.5;
        ys[1] = half_n;
        ny = 2;
      }
      if (k.z == -half_n) {
        factor *= 0.5;
        zs[1] = half_n;
        nz = 2;
      }
      for (int a = 0; a < nz; ++a) {
        for (int b = 0; b < ny; ++b) {
          const std::size_t idx =
              (static_cast<std::size_t>(fine_row(zs[a])) * m + fine_row(ys[b])) * mh + k.x;
          padded[idx] += factor * value;
        }
      }
    }
    engine.backward(padded, out.data[c]);
  }
  return out;
}

VectorField leray_project(VectorField u) {
  const TorusGrid& g = u.grid();
  auto ux = u.component(0);
  auto uy = u.component(1);
  auto uz = u.component(2);
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const int k2 = g.k2(i);
    if (k2 == 0) continue;
    const Wavevector k = g.wavevector(i);
    if (is_nyquist(g, k)) {
      ux[i] = uy[i] = uz[i] = Complex{};
      continue;
    }
    const Complex kdotu = double(k.x) * ux[i] + double(k.y) * uy[i] + double(k.z) * uz[i];
    const Complex s = kdotu / double(k2);
    ux[i] -= double(k.x) * s;
    uy[i] -= double(k.y) * s;
    uz[i] -= double(k.z) * s;
  }
  u.mark_divergence_free(true);
  return u;
}

VectorField dealias(VectorField u) {
  const TorusGrid& g = u.grid();
  for (int c = 0; c < 3; ++c) {
    auto comp = u.component(c);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      if (!g.in_dealiased_band(i)) comp[i] = Complex{};
    }
  }
  return u;
}

bool is_zero_mean(const VectorField& u) {
  for (int c = 0; c < 3; ++c) {
    if (u.component(c)[0] != Complex{}) return false;
  }
  return true;
}

double divergence_residual(const VectorField& u) {
  const TorusGrid& g = u.grid();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const Wavevector k = g.wavevector(i);
    const Complex d = double(k.x) * u.component(0)[i] + double(k.y) * u.component(1)[i] +
                      double(k.z) * u.component(2)[i];
    const double mag = std::sqrt(std::norm(u.component(0)[i]) + std::norm(u.component(1)[i]) +
                                 std::norm(u.component(2)[i]));
    num = std::max(num, std::abs(d));
    den = std::max(den, std::sqrt(double(g.k2(i))) * mag);
  }
  return den == 0.0 ? 0.0 : num / den;
}

double lebesgue_norm(const PhysicalField& samples, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("lebesgue_norm: r must be >= 1, got " + std::to_string(r));
  const auto& d = samples.data;
  const std::size_t size = d[0].size();
  if (std::isinf(r)) {
    double m2 = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      m2 = std::max(m2, d[0][i] * d[0][i] + d[1][i] * d[1][i] + d[2][i] * d[2][i]);
    }
    return std::sqrt(m2);
  }
  const double half_r = 0.5 * r;
  double sum = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double m2 = d[0][i] * d[0][i] + d[1][i] * d[1][i] + d[2][i] * d[2][i];
    if (m2 > 0.0) sum += std::pow(m2, half_r);
  }
  const double length = samples.grid.length();
  const double volume_element = length * length * length / static_cast<double>(size);
  return std::pow(sum * volume_element, 1.0 / r);
}

double lebesgue_norm(const VectorField& u, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("lebesgue_norm: r must be >= 1, got " + std::to_string(r));
  if (r == 2.0) return std::sqrt(inner_product(u, u));
  if (std::isinf(r)) return lebesgue_norm(inverse_transform(u), r);
  return lebesgue_norm(interpolate(u, 2 * u.grid().n()), r);
}

double sobolev_norm(const VectorField& u, double s) {
  if (s < 0.0 && !is_zero_mean(u)) {
    throw std::invalid_argument("sobolev_norm: negative order requires a zero-mean field");
  }
  const TorusGrid& g = u.grid();
  const double kappa0 = g.kappa0();
  const double length = g.length();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const int k2 = g.k2(i);
    if (k2 == 0) continue;
    const double amp2 =
        std::norm(u.component(0)[i]) + std::norm(u.component(1)[i]) + std::norm(u.component(2)[i]);
    if (amp2 == 0.0) continue;
    sum += g.hermitian_weight(i) * std::pow(kappa0 * kappa0 * k2, s) * amp2;
  }
  return std::sqrt(sum * length * length * length);
}

double inner_product(const VectorField& u, const VectorField& v) {
  const TorusGrid& g = u.grid();
  if (!(g == v.grid())) throw std::invalid_argument("inner_product: grids differ");
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto a = u.component(c);
    const auto b = v.component(c);
    for (std::size_t i = 0; i < a.size(); ++i) {
      sum += g.hermitian_weight(i) * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    }
  }
  const double length = g.length();
  return sum * length * length * length;
}

double gradient_norm2(const VectorField& u) {
  const double h1 = sobolev_norm(u, 1.0);
  return h1 * h1;
}

VectorField partial_derivative(const VectorField& u, int axis) {
  const TorusGrid& g = u.grid();
  VectorField out(g);
  const double kappa0 = g.kappa0();
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const Wavevector k = g.wavevector(i);
    if (is_nyquist(g, k)) continue;
    const int kc = axis == 0 ? k.x : (axis == 1 ? k.y : k.z);
    const Complex factor(0.0, kappa0 * kc);
    for (int c = 0; c < 3; ++c) out.component(c)[i] = factor * u.component(c)[i];
  }
  return out;
}

VectorField curl(const VectorField& u) {
  const TorusGrid& g = u.grid();
  VectorField w(g);
  const double kappa0 = g.kappa0();
  const auto ux = u.component(0);
  const auto uy = u.component(1);
  const auto uz = u.component(2);
  auto wx = w.component(0);
  auto wy = w.component(1);
  auto wz = w.component(2);
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const Wavevector k = g.wavevector(i);
    if (is_nyquist(g, k)) continue;
    const Complex ikx(0.0, kappa0 * k.x);
    const Complex iky(0.0, kappa0 * k.y);
    const Complex ikz(0.0, kappa0 * k.z);
    wx[i] = iky * uz[i] - ikz * uy[i];
    wy[i] = ikz * ux[i] - ikx * uz[i];
    wz[i] = ikx * uy[i] - iky * ux[i];
  }
  w.mark_divergence_free(true);
  return w;
}

VectorField random_solenoidal_field(const TorusGrid& grid, std::uint64_t seed, const RandomFieldSpec& spec) {
  if (!(spec.k0 > 0.0)) throw std::invalid_argument("random field: k0 must be positive");
  if (!(spec.u_rms >= 0.0)) throw std::invalid_argument("random field: u_rms must be non-negative");
  VectorField u(grid);
  for (std::size_t i = 0; i < grid.spectral_size(); ++i) {
    if (grid.k2(i) == 0 || !grid.in_dealiased_band(i)) continue;
    const Wavevector k = grid.wavevector(i);
    const bool own = canonical(k);
    const Wavevector rep = own ? k : Wavevector{-k.x, -k.y, -k.z};
    std::mt19937_64 rng(mode_seed(seed, rep));
    std::normal_distribution<double> normal;
    const double kmag = std::sqrt(double(k.norm2()));
    // Per-mode energy ~ k^2 exp(-k^2/k0^2) gives the shell spectrum k^4 exp(-k^2/k0^2).
    const double amp = kmag * std::exp(-0.5 * kmag * kmag / (spec.k0 * spec.k0));
    for (int c = 0; c < 3; ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      const Complex v = amp * Complex(re, own ? im : -im);
      u.component(c)[i] = v;
    }
  }
  u = leray_project(std::move(u));
  const double length = grid.length();
  const double current = std::sqrt(inner_product(u, u) / (3.0 * length * length * length));
  if (current > 0.0) u *= spec.u_rms / current;
  return u;
}

}  // namespace detmodes
