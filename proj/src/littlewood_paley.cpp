#include "detmodes/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "detmodes/spectral.hpp"

namespace detmodes {

namespace {

double smooth_step_kernel(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Applies a radial multiplier m(|k|) using one evaluation per distinct |k|^2.
template <typename Multiplier>
VectorField apply_radial(const VectorField& u, Multiplier&& m) {
  const TorusGrid& g = u.grid();
  std::vector<double> table(static_cast<std::size_t>(3 * (g.n() / 2) * (g.n() / 2) + 1));
  for (std::size_t k2 = 0; k2 < table.size(); ++k2) table[k2] = m(std::sqrt(double(k2)));
  VectorField out(g);
  for (int c = 0; c < 3; ++c) {
    const auto src = u.component(c);
    auto dst = out.component(c);
    for (std::size_t i = 0; i < src.size(); ++i) {
      const double w = table[static_cast<std::size_t>(g.k2(i))];
      dst[i] = w == 0.0 ? Complex{} : w * src[i];
    }
  }
  out.mark_divergence_free(u.divergence_free());
  return out;
}

}  // namespace

double DyadicMultiplier::chi(double xi) {
  xi = std::abs(xi);
  if (xi <= 0.75) return 1.0;
  if (xi >= 1.0) return 0.0;
  const double t = (xi - 0.75) * 4.0;
  const double a = smooth_step_kernel(1.0 - t);
  const double b = smooth_step_kernel(t);
  return a / (a + b);
}

double DyadicMultiplier::phi(double xi) { return chi(0.5 * xi) - chi(xi); }

double DyadicMultiplier::shell(int q, double k_magnitude) {
  if (q < -1) return 0.0;
  if (q == -1) return chi(k_magnitude);
  return phi(std::ldexp(k_magnitude, -q));
}

double DyadicMultiplier::below(int q, double k_magnitude) {
  if (q < -1) return 0.0;
  return chi(std::ldexp(k_magnitude, -(q + 1)));
}

int DyadicMultiplier::q_max(const TorusGrid& grid) {
  const double kmax = std::sqrt(double(grid.max_band_k2()));
  int q = -1;
  while (0.75 * std::ldexp(1.0, q + 1) < kmax) ++q;
  return q;
}

double dyadic_wavenumber(int q, double length) { return std::ldexp(1.0, q) / length; }

VectorField project_shell(const VectorField& u, int q) {
  if (q < -1) throw std::invalid_argument("project_shell: q must be >= -1");
  return apply_radial(u, [q](double k) { return DyadicMultiplier::shell(q, k); });
}

VectorField project_below(const VectorField& u, int big_q) {
  if (big_q < -1) throw std::invalid_argument("project_below: Q must be >= -1");
  return apply_radial(u, [big_q](double k) { return DyadicMultiplier::below(big_q, k); });
}

double ShellNorms::at(int q) const {
  if (q < -1) throw std::out_of_range("shell index below -1");
  if (q > q_max_) return 0.0;
  return values_[static_cast<std::size_t>(q + 1)];
}

ShellDecomposition::ShellDecomposition(const VectorField& u) : q_max_(DyadicMultiplier::q_max(u.grid())) {
  shells_.reserve(static_cast<std::size_t>(q_max_ + 2));
  for (int q = -1; q <= q_max_; ++q) shells_.push_back(project_shell(u, q));
}

VectorField ShellDecomposition::reconstruct() const {
  VectorField sum(shells_.front().grid());
  for (const auto& s : shells_) sum += s;
  return sum;
}

double ShellDecomposition::norm(int q, double r) {
  if (q > q_max_) return 0.0;
  const auto key = std::make_pair(q, r);
  if (auto it = norm_cache_.find(key); it != norm_cache_.end()) return it->second;
  const double v = lebesgue_norm(shell(q), r);
  norm_cache_.emplace(key, v);
  return v;
}

ShellNorms shell_norms(const VectorField& u, double r) {
  if (!(r > 1.0)) throw std::invalid_argument("shell_norms: r must lie in (1, infinity]");
  const int qmax = DyadicMultiplier::q_max(u.grid());
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(qmax + 2));
  for (int q = -1; q <= qmax; ++q) values.push_back(lebesgue_norm(project_shell(u, q), r));
  return ShellNorms(qmax, std::move(values));
}

double bernstein_ratio(const VectorField& u_q, int q, double s, double r) {
  if (!(s >= 1.0) || !(r >= s)) throw std::invalid_argument("bernstein_ratio: requires r >= s >= 1");
  const double ns = lebesgue_norm(u_q, s);
  if (ns == 0.0) throw std::domain_error("bernstein_ratio: ||u_q||_s vanishes");
  const double nr = s == r ? ns : lebesgue_norm(u_q, r);
  const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  const double lambda = dyadic_wavenumber(q, u_q.grid().length());
  return nr / (std::pow(lambda, 3.0 * (1.0 / s - inv_r)) * ns);
}

double partition_of_unity_error(const TorusGrid& grid) {
  const int qmax = DyadicMultiplier::q_max(grid);
  double err = 0.0;
  for (int k2 = 0; k2 <= grid.max_band_k2(); ++k2) {
    const double k = std::sqrt(double(k2));
    double sum = 0.0;
    for (int q = -1; q <= qmax; ++q) sum += DyadicMultiplier::shell(q, k);
    err = std::max(err, std::abs(sum - 1.0));
    err = std::max(err, std::abs(DyadicMultiplier::below(qmax, k) - 1.0));
  }
  return err;
}

}  // namespace detmodes
