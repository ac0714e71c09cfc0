#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hetflow/grid.hpp"

namespace hetflow {

/// Plain symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  SymTridiag() = default;
  /// Throws std::invalid_argument when off.size() + 1 != diag.size().
  SymTridiag(std::vector<double> diag, std::vector<double> off);

  std::size_t size() const noexcept { return diag.size(); }
  /// Infinity norm (max absolute row sum).
  double norm() const noexcept;
  /// Gershgorin enclosure [lo, hi] of the spectrum.
  double gershgorin_lower() const noexcept;
  double gershgorin_upper() const noexcept;

  SymTridiag negated() const;
  SymTridiag shifted(double c) const;
};

struct Inertia {
  /// #{eigenvalues strictly below the shift}.
  std::size_t count = 0;
  /// A pivot fell below the breakdown tolerance and the shift was nudged.
  bool singular = false;
};

/// Sylvester inertia of T - sigma I from the pivots of the LDL^T (Sturm)
/// recurrence. On pivot breakdown sigma is nudged down by 2^-40 * ||T||
/// and the count repeated.
Inertia inertia_below(const SymTridiag& t, double sigma);

/// Solves (T - sigma I) x = rhs by elimination with partial pivoting.
/// Throws SingularPivot when a pivot magnitude is <= pivot_tol * ||T - sigma I||.
std::vector<double> solve_shifted(const SymTridiag& t, double sigma, std::span<const double> rhs,
                                  double pivot_tol = 1e-14);

/// Same elimination, but pivots below eps * ||T - sigma I|| are replaced by
/// that value instead of failing; for inverse iteration at an eigenvalue.
std::vector<double> solve_shifted_guarded(const SymTridiag& t, double sigma,
                                          std::span<const double> rhs);

/// Discrete operator on a grid. Represents A = S^-1 T S with T symmetric
/// tridiagonal and S = diag(scale); S is the identity in line mode and
/// diag(r_i^((d-1)/2)) in radial mode, so A is self-adjoint in the weighted
/// inner product and shares its inertia with T.
class TridiagOperator {
 public:
  TridiagOperator(Grid grid, SymTridiag matrix, std::vector<double> scale);

  const Grid& grid() const noexcept { return grid_; }
  const SymTridiag& matrix() const noexcept { return matrix_; }
  std::span<const double> scale() const noexcept { return scale_; }
  std::size_t size() const noexcept { return matrix_.size(); }
  double norm() const noexcept { return matrix_.norm(); }

  /// A + diag(v), v sampled on the same grid.
  TridiagOperator with_potential(std::span<const double> v) const;
  TridiagOperator shifted(double c) const;

 private:
  Grid grid_;
  SymTridiag matrix_;
  std::vector<double> scale_;
};

/// -Delta_h with Dirichlet truncation (radial mode: symmetrized radial stencil).
TridiagOperator assemble_laplacian(const Grid& grid);

/// -Delta_h + V.
TridiagOperator assemble_schrodinger(const Grid& grid, const Field& potential);

Inertia inertia_below(const TridiagOperator& t, double sigma);

Field apply(const TridiagOperator& t, const Field& u);

/// Solves (A - sigma I) u = rhs.
Field solve_shifted(const TridiagOperator& t, double sigma, const Field& rhs,
                    double pivot_tol = 1e-14);

/// Factorization of the SPD matrix I + dt*(T + diag(damping)), reused across
/// time steps.
class SpdTridiagFactor {
 public:
  SpdTridiagFactor(const SymTridiag& t, std::span<const double> damping, double dt);
  /// Overwrites b with the solution.
  void solve_in_place(std::span<double> b) const;

 private:
  std::vector<double> d_;  // pivots of LDL^T
  std::vector<double> l_;  // subdiagonal multipliers
};

}  // namespace hetflow
