#include "hetflow/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hetflow/errors.hpp"
#include "hetflow/kernels.hpp"

namespace hetflow {

SymTridiag::SymTridiag(std::vector<double> d, std::vector<double> e)
    : diag(std::move(d)), off(std::move(e)) {
  if (diag.empty() || off.size() + 1 != diag.size()) {
    throw std::invalid_argument("tridiagonal needs n diagonal and n-1 off-diagonal entries");
  }
}

double SymTridiag::norm() const noexcept {
  const std::size_t n = diag.size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(off[i - 1]);
    if (i + 1 < n) row += std::abs(off[i]);
    best = std::max(best, row);
  }
  return best;
}

double SymTridiag::gershgorin_lower() const noexcept {
  const std::size_t n = diag.size();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
  }
  return lo;
}

double SymTridiag::gershgorin_upper() const noexcept {
  const std::size_t n = diag.size();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    hi = std::max(hi, diag[i] + r);
  }
  return hi;
}

SymTridiag SymTridiag::negated() const {
  SymTridiag t = *this;
  for (double& v : t.diag) v = -v;
  for (double& v : t.off) v = -v;
  return t;
}

SymTridiag SymTridiag::shifted(double c) const {
  SymTridiag t = *this;
  for (double& v : t.diag) v += c;
  return t;
}

namespace {

// Number of negative pivots of T - sigma I; returns false on breakdown.
bool sturm_count(const SymTridiag& t, double sigma, double tiny, std::size_t& count) {
  count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    const double e2 = i > 0 ? t.off[i - 1] * t.off[i - 1] : 0.0;
    d = (t.diag[i] - sigma) - (i > 0 ? e2 / d : 0.0);
    if (std::abs(d) <= tiny) return false;
    if (d < 0.0) ++count;
  }
  return true;
}

}  // namespace

Inertia inertia_below(const SymTridiag& t, double sigma) {
  const double scale = std::max(t.norm(), std::abs(sigma));
  const double ref = scale > 0.0 ? scale : 1.0;
  const double tiny = std::numeric_limits<double>::epsilon() * ref;
  const double nudge = std::ldexp(ref, -40);
  Inertia result;
  double s = sigma;
  for (int attempt = 0; attempt < 64; ++attempt) {
    if (sturm_count(t, s, tiny, result.count)) return result;
    result.singular = true;
    s -= nudge * static_cast<double>(attempt + 1);
  }
  throw ConvergenceFailure("inertia count: repeated pivot breakdown");
}

namespace {

// Banded elimination with partial pivoting. With guard set, pivots at or
// below tol are replaced by tol (inverse iteration); otherwise they throw.
std::vector<double> banded_solve(const SymTridiag& t, double sigma, std::span<const double> rhs,
                                 double pivot_tol, bool guard) {
  const std::size_t n = t.size();
  if (rhs.size() != n) throw std::invalid_argument("rhs length does not match operator");
  const double mat_norm = t.shifted(-sigma).norm();
  const double tol = pivot_tol * (mat_norm > 0.0 ? mat_norm : 1.0);
  auto check = [&](std::size_t i, double& p) {
    if (std::abs(p) > tol) return;
    if (!guard) throw SingularPivot(i, p);
    p = p < 0.0 ? -tol : tol;
  };

  // Row i of the working band: entries in columns i, i+1, i+2 (u0, u1, u2).
  std::vector<double> u0(n), u1(n, 0.0), u2(n, 0.0), x(rhs.begin(), rhs.end());
  std::vector<double> sub(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    u0[i] = t.diag[i] - sigma;
    if (i + 1 < n) {
      u1[i] = t.off[i];
      sub[i + 1] = t.off[i];
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Candidate rows: i (u0[i], u1[i], u2[i]) and i+1 (sub[i+1], u0[i+1], u1[i+1]).
    if (std::abs(sub[i + 1]) > std::abs(u0[i])) {
      std::swap(u0[i], sub[i + 1]);
      std::swap(u1[i], u0[i + 1]);
      std::swap(u2[i], u1[i + 1]);
      std::swap(x[i], x[i + 1]);
    }
    check(i, u0[i]);
    const double m = sub[i + 1] / u0[i];
    u0[i + 1] -= m * u1[i];
    u1[i + 1] -= m * u2[i];
    x[i + 1] -= m * x[i];
  }
  check(n - 1, u0[n - 1]);
  for (std::size_t k = n; k-- > 0;) {
    double v = x[k];
    if (k + 1 < n) v -= u1[k] * x[k + 1];
    if (k + 2 < n) v -= u2[k] * x[k + 2];
    x[k] = v / u0[k];
  }
  return x;
}

}  // namespace

std::vector<double> solve_shifted(const SymTridiag& t, double sigma, std::span<const double> rhs,
                                  double pivot_tol) {
  return banded_solve(t, sigma, rhs, pivot_tol, false);
}

std::vector<double> solve_shifted_guarded(const SymTridiag& t, double sigma,
                                          std::span<const double> rhs) {
  return banded_solve(t, sigma, rhs, std::numeric_limits<double>::epsilon(), true);
}

TridiagOperator::TridiagOperator(Grid grid, SymTridiag matrix, std::vector<double> scale)
    : grid_(std::move(grid)), matrix_(std::move(matrix)), scale_(std::move(scale)) {
  if (matrix_.size() != grid_.size() || scale_.size() != grid_.size()) {
    throw GridMismatch();
  }
}

TridiagOperator TridiagOperator::with_potential(std::span<const double> v) const {
  if (v.size() != size()) throw GridMismatch();
  SymTridiag m = matrix_;
  for (std::size_t i = 0; i < v.size(); ++i) m.diag[i] += v[i];
  return TridiagOperator(grid_, std::move(m), scale_);
}

TridiagOperator TridiagOperator::shifted(double c) const {
  return TridiagOperator(grid_, matrix_.shifted(c), scale_);
}

TridiagOperator assemble_laplacian(const Grid& grid) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  // Stiffness K with entries from face weights, mass W = diag(cell weights);
  // A = W^-1 K, T = W^-1/2 K W^-1/2, S = (W/h)^1/2.
  std::vector<double> diag(n), off(n - 1), scale(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = grid.cell_weight(i);
    diag[i] = (grid.face_weight(i) + grid.face_weight(i + 1)) / (h * w);
    scale[i] = std::sqrt(w / h);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double w = std::sqrt(grid.cell_weight(i) * grid.cell_weight(i + 1));
    off[i] = -grid.face_weight(i + 1) / (h * w);
  }
  return TridiagOperator(grid, SymTridiag(std::move(diag), std::move(off)), std::move(scale));
}

TridiagOperator assemble_schrodinger(const Grid& grid, const Field& potential) {
  if (!(potential.grid() == grid)) throw GridMismatch();
  return assemble_laplacian(grid).with_potential(potential.values());
}

Inertia inertia_below(const TridiagOperator& t, double sigma) {
  return inertia_below(t.matrix(), sigma);
}

Field apply(const TridiagOperator& t, const Field& u) {
  if (!(u.grid() == t.grid())) throw GridMismatch();
  const std::size_t n = u.size();
  const auto s = t.scale();
  std::vector<double> su(n), y(n);
  for (std::size_t i = 0; i < n; ++i) su[i] = s[i] * u[i];
  kernels::tridiag_apply(t.matrix().diag, t.matrix().off, su, y);
  for (std::size_t i = 0; i < n; ++i) y[i] /= s[i];
  return Field(t.grid(), std::move(y));
}

Field solve_shifted(const TridiagOperator& t, double sigma, const Field& rhs, double pivot_tol) {
  if (!(rhs.grid() == t.grid())) throw GridMismatch();
  const std::size_t n = rhs.size();
  const auto s = t.scale();
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = s[i] * rhs[i];
  std::vector<double> v = solve_shifted(t.matrix(), sigma, b, pivot_tol);
  for (std::size_t i = 0; i < n; ++i) v[i] /= s[i];
  return Field(t.grid(), std::move(v));
}

SpdTridiagFactor::SpdTridiagFactor(const SymTridiag& t, std::span<const double> damping,
                                   double dt)
    : d_(t.size()), l_(t.size() > 0 ? t.size() - 1 : 0) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (damping.size() != t.size()) throw GridMismatch();
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    double a = 1.0 + dt * (t.diag[i] + damping[i]);
    if (i > 0) {
      const double e = dt * t.off[i - 1];
      l_[i - 1] = e / d_[i - 1];
      a -= l_[i - 1] * e;
    }
    if (!(a > 0.0)) throw SingularPivot(i, a);
    d_[i] = a;
  }
}

void SpdTridiagFactor::solve_in_place(std::span<double> b) const {
  const std::size_t n = d_.size();
  for (std::size_t i = 1; i < n; ++i) b[i] -= l_[i - 1] * b[i - 1];
  for (std::size_t i = 0; i < n; ++i) b[i] /= d_[i];
  for (std::size_t i = n - 1; i-- > 0;) b[i] -= l_[i] * b[i + 1];
}

}  // namespace hetflow
