#include "detmodes/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "detmodes/littlewood_paley.hpp"
#include "detmodes/spectral.hpp"

namespace detmodes {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Lazily computed shell norms of one field. Every value is produced by the
// same project_shell / project_below + lebesgue_norm path a caller would use.
class ShellNormCache {
 public:
  explicit ShellNormCache(const VectorField& u) : u_(u), qmax_(DyadicMultiplier::q_max(u.grid())) {
    const auto n = static_cast<std::size_t>(qmax_ + 1);
    shells_.resize(n);
    lr_.assign(n, kNaN);
    l2_.assign(n, kNaN);
    linf_.assign(n, kNaN);
    below_linf_.assign(n, kNaN);
    wiener_.assign(n, kNaN);
  }

  int q_max() const { return qmax_; }
  double length() const { return u_.grid().length(); }

  double lr(int q, double r) {
    if (r != r_) {
      std::fill(lr_.begin(), lr_.end(), kNaN);
      r_ = r;
    }
    return fetch(lr_, q, [&] { return lebesgue_norm(shell(q), r); });
  }
  double l2(int q) {
    return fetch(l2_, q, [&] { return lebesgue_norm(shell(q), 2.0); });
  }
  double linf(int q) {
    return fetch(linf_, q, [&] { return lebesgue_norm(shell(q), kInfinity); });
  }
  double below_linf(int q) {
    return fetch(below_linf_, q, [&] { return lebesgue_norm(project_below(u_, q), kInfinity); });
  }

  // Upper bound for lr(q, r): Hoelder between L^2 and the sup, with the sup
  // bounded by the sum of coefficient magnitudes. The rectangle rule behind
  // lr is exact for |u_q|^2, so the bound holds for the computed value too.
  double lr_upper(int q, double r) {
    const double w = fetch(wiener_, q, [&] {
      const VectorField& s = shell(q);
      const TorusGrid& g = s.grid();
      double sum = 0.0;
      for (std::size_t i = 0; i < g.spectral_size(); ++i) {
        const double a2 =
            std::norm(s.component(0)[i]) + std::norm(s.component(1)[i]) + std::norm(s.component(2)[i]);
        if (a2 > 0.0) sum += g.hermitian_weight(i) * std::sqrt(a2);
      }
      return sum;
    });
    return std::pow(l2(q), 2.0 / r) * std::pow(w, 1.0 - 2.0 / r);
  }

 private:
  const VectorField& shell(int q) {
    auto& slot = shells_.at(static_cast<std::size_t>(q));
    if (!slot) slot.emplace(project_shell(u_, q));
    return *slot;
  }

  template <typename F>
  double fetch(std::vector<double>& slot, int q, F&& compute) {
    auto& v = slot.at(static_cast<std::size_t>(q));
    if (std::isnan(v)) v = compute();
    return v;
  }

  const VectorField& u_;
  int qmax_;
  double r_ = kNaN;
  std::vector<std::optional<VectorField>> shells_;
  std::vector<double> lr_;
  std::vector<double> l2_;
  std::vector<double> linf_;
  std::vector<double> below_linf_;
  std::vector<double> wiener_;
};

void check_r(double r) {
  if (!(r > 2.0 && r < 3.0)) {
    throw std::invalid_argument("r must lie in the open interval (2,3), got " + std::to_string(r));
  }
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
}

DyadicLevel determining_from_cache(ShellNormCache& cache, double r, double c_r, double nu) {
  const int qmax = cache.q_max();
  const double length = cache.length();
  const double threshold = c_r * nu;
  const double exponent = -1.0 + 3.0 / r;
  // The high-mode condition holds for q iff it holds for every p > q, so the
  // admissible q form [q_high, inf); scan down to the first failing shell.
  int q_high = 0;
  for (int p = qmax; p >= 1; --p) {
    const double lambda_p = dyadic_wavenumber(p, length);
    const double weight = std::pow(lambda_p, exponent);
    // A clear pass on the upper bound decides the shell without the costly norm.
    if (weight * cache.lr_upper(p, r) * (1.0 + 1e-9) < threshold) continue;
    if (!(weight * cache.lr(p, r) < threshold)) {
      q_high = p;
      break;
    }
  }
  for (int q = q_high; q <= qmax; ++q) {
    const double lambda_q = dyadic_wavenumber(q, length);
    if (cache.below_linf(q) / lambda_q < threshold) return {lambda_q, q, false};
  }
  return {dyadic_wavenumber(qmax + 1, length), qmax + 1, true};
}

DyadicLevel dissipation_from_cache(ShellNormCache& cache, double c0, double nu) {
  const int qmax = cache.q_max();
  const double length = cache.length();
  const double threshold = c0 * nu;
  for (int p = qmax; p >= 1; --p) {
    const double lambda_p = dyadic_wavenumber(p, length);
    if (!(cache.linf(p) / lambda_p < threshold)) return {lambda_p, p, p == qmax};
  }
  return {dyadic_wavenumber(0, length), 0, false};
}

double safe_ratio(double lhs, double rhs) {
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return lhs / rhs;
}

}  // namespace

DyadicLevel determining_wavenumber(const VectorField& u, double r, double c_r, double nu) {
  check_r(r);
  check_positive(c_r, "c_r");
  check_positive(nu, "nu");
  ShellNormCache cache(u);
  return determining_from_cache(cache, r, c_r, nu);
}

DyadicLevel dissipation_wavenumber(const VectorField& u, double c0, double nu) {
  check_positive(c0, "c0");
  check_positive(nu, "nu");
  ShellNormCache cache(u);
  return dissipation_from_cache(cache, c0, nu);
}

ReynoldsProfiles reynolds_profiles(const VectorField& u, double nu) {
  check_positive(nu, "nu");
  ShellNormCache cache(u);
  ReynoldsProfiles out;
  for (int q = 0; q <= cache.q_max(); ++q) {
    const double scale = dyadic_wavenumber(q, cache.length()) * nu;
    out.high.push_back(cache.linf(q) / scale);
    out.low.push_back(cache.below_linf(q) / scale);
  }
  return out;
}

double grashof(const VectorField& f, double nu) {
  check_positive(nu, "nu");
  if (!is_zero_mean(f)) throw std::invalid_argument("grashof: forcing must have zero mean");
  return sobolev_norm(f, -1.0) / (nu * nu * std::sqrt(f.grid().kappa0()));
}

double time_average(std::span<const double> t, std::span<const double> values) {
  if (t.empty() || t.size() != values.size()) {
    throw std::invalid_argument("time_average: need a nonempty series with matching lengths");
  }
  if (t.size() == 1) return values[0];
  double integral = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    integral += 0.5 * (values[i] + values[i - 1]) * (t[i] - t[i - 1]);
  }
  const double window = t.back() - t.front();
  if (!(window > 0.0)) throw std::invalid_argument("time_average: sample times must increase");
  return integral / window;
}

double energy_dissipation_rate(std::span<const double> t, std::span<const double> enstrophy, double nu,
                               double d, double length) {
  if (t.empty()) throw std::invalid_argument("energy_dissipation_rate: empty series");
  if (!(d >= 0.0 && d <= 3.0)) throw std::invalid_argument("energy_dissipation_rate: d must lie in [0,3]");
  return nu * std::pow(1.0 / length, d) * time_average(t, enstrophy);
}

double kolmogorov_wavenumber(double eps, double nu, double d) {
  if (!(eps >= 0.0)) throw std::invalid_argument("kolmogorov_wavenumber: eps must be >= 0");
  if (!(d >= 0.0 && d <= 3.0)) throw std::invalid_argument("kolmogorov_wavenumber: d must lie in [0,3]");
  return std::pow(eps / (nu * nu * nu), 1.0 / (d + 1.0));
}

IntermittencyEstimate intermittency_dimension(std::span<const ShellSeriesSample> series, double r,
                                              double length) {
  if (series.empty()) throw std::invalid_argument("intermittency_dimension: empty series");
  check_r(r);
  const double a = -1.0 + 6.0 / r;
  const double b = 1.0 - 2.0 / r;
  const double lambda0 = 1.0 / length;

  std::size_t nq = 0;
  for (const auto& s : series) nq = std::max(nq, s.lr.size());
  std::vector<double> times;
  times.reserve(series.size());
  for (const auto& s : series) times.push_back(s.t);

  // Per-shell time averages of 1_{q<=Q} ||u_q||_r^2 and the averaged RHS sum.
  std::vector<double> lhs_weights(nq, 0.0);
  std::vector<double> column(series.size());
  for (std::size_t q = 0; q < nq; ++q) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto& s = series[i];
      const bool active = static_cast<int>(q) <= s.big_q && q < s.lr.size();
      column[i] = active ? s.lr[q] * s.lr[q] : 0.0;
    }
    lhs_weights[q] = time_average(times, column);
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    double sum = 0.0;
    for (std::size_t q = 0; q < s.l2.size() && static_cast<int>(q) <= s.big_q; ++q) {
      const double lambda = dyadic_wavenumber(static_cast<int>(q), length);
      sum += lambda * lambda * s.l2[q] * s.l2[q];
    }
    column[i] = sum;
  }
  const double rhs_base = time_average(times, column);

  auto lhs = [&](double d) {
    double sum = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
      sum += std::pow(dyadic_wavenumber(static_cast<int>(q), length), a + d * b) * lhs_weights[q];
    }
    return sum;
  };
  auto rhs = [&](double d) { return std::pow(lambda0, d * b) * rhs_base; };
  auto feasible = [&](double d) { return lhs(d) <= rhs(d); };

  double d = 0.0;
  if (feasible(3.0)) {
    d = 3.0;
  } else if (feasible(0.0)) {
    double lo = 0.0;
    double hi = 3.0;
    while (hi - lo > 1e-4) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? lo : hi) = mid;
    }
    d = lo;
  }
  return {d, safe_ratio(lhs(d), rhs(d))};
}

WavenumberRecord analyze_field(const VectorField& u, double t, const DiagnosticParams& params) {
  check_r(params.r);
  check_positive(params.c_r, "c_r");
  check_positive(params.c0, "c0");
  check_positive(params.nu, "nu");
  ShellNormCache cache(u);
  WavenumberRecord rec;
  rec.t = t;
  const DyadicLevel lam = determining_from_cache(cache, params.r, params.c_r, params.nu);
  rec.lambda = lam.lambda;
  rec.q = lam.q;
  rec.saturated = lam.saturated;
  const DyadicLevel dis = dissipation_from_cache(cache, params.c0, params.nu);
  rec.lambda_dis = dis.lambda;
  rec.q_dis = dis.q;
  rec.dis_saturated = dis.saturated;
  rec.enstrophy = gradient_norm2(u);
  rec.energy = 0.5 * inner_product(u, u);
  for (int q = 0; q <= cache.q_max(); ++q) {
    const double scale = dyadic_wavenumber(q, cache.length()) * params.nu;
    rec.rh.push_back(cache.linf(q) / scale);
    rec.rl.push_back(cache.below_linf(q) / scale);
    rec.shell_lr.push_back(q <= rec.q ? cache.lr(q, params.r) : kNaN);
    rec.shell_l2.push_back(cache.l2(q));
  }
  return rec;
}

AveragedDiagnostics average_diagnostics(std::span<const WavenumberRecord> records, const DiagnosticParams& params,
                                        double length, double grashof_number, std::optional<double> d_override) {
  if (records.empty()) throw std::invalid_argument("average_diagnostics: empty series");
  AveragedDiagnostics out;
  out.lambda0 = 1.0 / length;
  out.grashof = grashof_number;
  std::vector<double> t;
  std::vector<double> lambda;
  std::vector<double> excess;
  std::vector<double> indicator;
  std::vector<double> enstrophy;
  std::vector<ShellSeriesSample> shells;
  for (const auto& rec : records) {
    if (rec.saturated) {
      ++out.n_saturated;
      continue;
    }
    t.push_back(rec.t);
    lambda.push_back(rec.lambda);
    excess.push_back(rec.lambda > out.lambda0 ? rec.lambda - out.lambda0 : 0.0);
    indicator.push_back(rec.lambda > out.lambda0 ? rec.lambda : 0.0);
    enstrophy.push_back(rec.enstrophy);
    shells.push_back({rec.t, rec.q, rec.shell_lr, rec.shell_l2});
  }
  out.n_used = static_cast<int>(t.size());
  if (t.empty()) return out;

  out.window = t.back() - t.front();
  out.mean_lambda = time_average(t, lambda);
  out.mean_lambda_excess = time_average(t, excess);
  out.mean_lambda_indicator = time_average(t, indicator);
  out.mean_enstrophy = time_average(t, enstrophy);
  if (d_override) {
    if (!(*d_override >= 0.0 && *d_override <= 3.0)) throw std::invalid_argument("d override must lie in [0,3]");
    out.d = *d_override;
    out.d_overridden = true;
  } else {
    const auto est = intermittency_dimension(shells, params.r, length);
    out.d = est.d;
    out.d_constant = est.constant;
  }
  out.eps = energy_dissipation_rate(t, enstrophy, params.nu, out.d, length);
  out.kappa_d = kolmogorov_wavenumber(out.eps, params.nu, out.d);
  return out;
}

BoundReport bound_reports(std::span<const WavenumberRecord> records, const AveragedDiagnostics& averaged,
                          const DiagnosticParams& params) {
  BoundReport report;
  const double nu = params.nu;
  const double nu2 = nu * nu;
  const double lambda0 = averaged.lambda0;
  const double kappa0 = 2.0 * std::numbers::pi * lambda0;

  double best = 0.0;
  BoundRow pointwise{"pointwise: Lambda(t) vs |grad u(t)|^2/nu^2", kNaN, kNaN, 0.0};
  for (const auto& rec : records) {
    if (rec.saturated || rec.enstrophy == 0.0) continue;
    const double rhs = rec.enstrophy / nu2;
    const double ratio = rec.lambda / rhs;
    if (!(ratio <= best) || std::isnan(pointwise.lhs)) {
      best = std::max(best, ratio);
      pointwise = {pointwise.name, rec.lambda, rhs, ratio};
    }
  }
  report.max_pointwise_ratio = best;
  report.rows.push_back(pointwise);

  const double excess = averaged.mean_lambda_excess;
  const double g2 = averaged.grashof * averaged.grashof;
  const double b = 1.0 - 2.0 / params.r;
  const double d = averaged.d;
  const double eps0 = nu * averaged.mean_enstrophy;
  const double window = averaged.window;

  auto add = [&](std::string name, double rhs) {
    report.rows.push_back({std::move(name), excess, rhs, safe_ratio(excess, rhs)});
  };
  add("average: <Lambda>-lambda0 vs <|grad u|^2>/nu^2", averaged.mean_enstrophy / nu2);
  add("intermittent: <Lambda>-lambda0 vs (eps/nu^3)^(1/(1+d(1-2/r))) lambda0^(-2d/(r+d(r-2)))",
      std::pow(averaged.eps / (nu2 * nu), 1.0 / (1.0 + d * b)) *
          std::pow(lambda0, -2.0 * d / (params.r + d * (params.r - 2.0))));
  add("extreme intermittency d=0: <Lambda>-lambda0 vs kappa_d = eps/nu^3", eps0 / (nu2 * nu));
  add("grashof: <Lambda>-lambda0 vs G^2/(T nu^2 kappa0) + kappa0 G^2",
      window > 0.0 ? g2 / (window * nu2 * kappa0) + kappa0 * g2 : std::numeric_limits<double>::infinity());
  add("grashof intermittent: <Lambda>-lambda0 vs kappa0 (G^2/(T nu^2 kappa0^2) + G^2)^(1/(1+d(1-2/r)))",
      window > 0.0 ? kappa0 * std::pow(g2 / (window * nu2 * kappa0 * kappa0) + g2, 1.0 / (1.0 + d * b))
                   : std::numeric_limits<double>::infinity());

  for (const auto& row : report.rows) {
    if (!std::isfinite(row.ratio)) report.all_finite = false;
  }
  return report;
}

double bernstein_constant(const TorusGrid& grid, double r) {
  VectorField delta(grid);
  for (std::size_t i = 0; i < grid.spectral_size(); ++i) {
    if (grid.in_dealiased_band(i) && grid.k2(i) != 0) delta.component(0)[i] = 1.0;
  }
  double best = 0.0;
  for (int q = 0; q <= DyadicMultiplier::q_max(grid); ++q) {
    best = std::max(best, bernstein_ratio(project_shell(delta, q), q, r, kInfinity));
  }
  return best;
}

double calibrated_c0(const TorusGrid& grid, double r, double c_r) { return bernstein_constant(grid, r) * c_r; }

}  // namespace detmodes
