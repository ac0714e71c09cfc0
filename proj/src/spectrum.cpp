#include "hetflow/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "hetflow/errors.hpp"
#include "hetflow/kernels.hpp"

namespace hetflow {

std::size_t count_negative(const SymTridiag& t) { return inertia_below(t, 0.0).count; }
std::size_t count_negative(const TridiagOperator& t) { return count_negative(t.matrix()); }

std::vector<double> eigenvalues_below(const SymTridiag& t, double cutoff, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tolerance must be positive");
  const std::size_t count = inertia_below(t, cutoff).count;
  std::vector<double> eig(count);
  if (count == 0) return eig;
  const double lower = t.gershgorin_lower() - 1.0;
  const double floor_tol = 4.0 * std::numeric_limits<double>::epsilon() *
                           std::max({std::abs(lower), std::abs(cutoff), 1.0});
  const double eff_tol = std::max(tol, floor_tol);

  // Each bracket is independent: find the smallest x with count(x) > k.
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k) {
    double lo = lower;
    double hi = cutoff;
    while (hi - lo > eff_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (inertia_below(t, mid).count > static_cast<std::size_t>(k)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    eig[static_cast<std::size_t>(k)] = 0.5 * (lo + hi);
  }
  return eig;
}

std::vector<double> eigenvalues_below(const TridiagOperator& t, double cutoff, double tol) {
  return eigenvalues_below(t.matrix(), cutoff, tol);
}

namespace {

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

Field eigenvector(const TridiagOperator& op, double lambda) {
  const SymTridiag& t = op.matrix();
  const std::size_t n = t.size();
  const double tnorm = std::max(t.norm(), std::numeric_limits<double>::min());

  // Deterministic, non-symmetric start so no eigenvector is orthogonal to it.
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  }
  double nv = l2(v);
  for (double& x : v) x /= nv;

  std::vector<double> tv(n);
  double rayleigh = lambda;
  double residual = std::numeric_limits<double>::infinity();
  constexpr int max_iter = 12;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> y = solve_shifted_guarded(t, lambda, v);
    nv = l2(y);
    if (!(nv > 0.0) || !std::isfinite(nv)) break;
    for (std::size_t i = 0; i < n; ++i) v[i] = y[i] / nv;
    kernels::tridiag_apply(t.diag, t.off, v, tv);
    rayleigh = 0.0;
    for (std::size_t i = 0; i < n; ++i) rayleigh += v[i] * tv[i];
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = tv[i] - rayleigh * v[i];
      r2 += d * d;
    }
    residual = std::sqrt(r2);
    if (it >= 1 && residual <= 1e-12 * tnorm) break;
  }
  if (!(residual <= 1e-8 * tnorm)) {
    throw ConvergenceFailure("inverse iteration did not converge near lambda = " +
                             std::to_string(lambda));
  }

  // Back to the grid representation u = S^-1 v, unit weighted l2 norm.
  const auto s = op.scale();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = v[i] / s[i];
  Field f(op.grid(), std::move(u));
  f *= 1.0 / l2_norm(f);

  double vmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) vmax = std::max(vmax, std::abs(f[i]));
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(f[i]) > 1e-6 * vmax) {
      if (f[i] < 0.0) f *= -1.0;
      break;
    }
  }
  return f;
}

double default_resonance_tol(const Grid& grid) {
  const double h = grid.spacing();
  return 10.0 * h * h;
}

SpectralReport nonresonance_report(const TridiagOperator& t, double nu_tilde, double tol,
                                   bool with_vectors) {
  if (!(nu_tilde > 0.0)) throw std::invalid_argument("nu_tilde must be positive");
  SpectralReport rep;
  rep.cutoff = 0.5 * nu_tilde;
  rep.tol = tol;
  const double bisect_tol = std::max(1e-13 * t.norm(), 1e-3 * tol);
  rep.eigenvalues_below_cutoff = eigenvalues_below(t, rep.cutoff, bisect_tol);
  rep.count_negative = count_negative(t);
  rep.kernel_gap = rep.cutoff;
  for (double lam : rep.eigenvalues_below_cutoff) {
    rep.kernel_gap = std::min(rep.kernel_gap, std::abs(lam));
  }
  if (with_vectors) {
    for (double lam : rep.eigenvalues_below_cutoff) {
      if (lam < 0.0) rep.eigenvectors.push_back(eigenvector(t, lam));
    }
  }
  return rep;
}

std::size_t eigenvalues_near_zero(const SymTridiag& t, double tol) {
  const double above = std::nextafter(tol, std::numeric_limits<double>::infinity());
  return inertia_below(t, above).count - inertia_below(t, -tol).count;
}

}  // namespace hetflow
