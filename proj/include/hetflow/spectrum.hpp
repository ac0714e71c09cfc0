#pragma once

#include <cstddef>
#include <vector>

#include "hetflow/grid.hpp"
#include "hetflow/tridiag.hpp"

namespace hetflow {

/// Exact number of negative eigenvalues (inertia at 0).
std::size_t count_negative(const TridiagOperator& t);
std::size_t count_negative(const SymTridiag& t);

/// Eigenvalues strictly below cutoff, ascending, each located by bisection on
/// inertia counts to within tol. The list length always equals
/// inertia_below(t, cutoff).count.
std::vector<double> eigenvalues_below(const SymTridiag& t, double cutoff, double tol);
std::vector<double> eigenvalues_below(const TridiagOperator& t, double cutoff, double tol);

/// Unit eigenvector (weighted l2) for an isolated eigenvalue by inverse
/// iteration. Sign: the first component exceeding 1e-6 of the max magnitude
/// is positive. Throws ConvergenceFailure when the residual test
/// ||A v - lambda v|| <= 1e-8 ||A|| is not met.
Field eigenvector(const TridiagOperator& t, double lambda);

struct SpectralReport {
  std::size_t count_negative = 0;
  std::vector<double> eigenvalues_below_cutoff;
  /// min |lambda| over the computed eigenvalues, or the cutoff when none lie
  /// below it.
  double kernel_gap = 0.0;
  double cutoff = 0.0;
  double tol = 0.0;
  std::vector<Field> eigenvectors;

  bool certified() const noexcept { return kernel_gap >= tol; }
};

/// Default non-resonance threshold 10 h^2.
double default_resonance_tol(const Grid& grid);

/// Spectrum below nu_tilde/2 and the gap at zero. Eigenvectors are attached
/// for the negative eigenvalues when with_vectors is set.
SpectralReport nonresonance_report(const TridiagOperator& t, double nu_tilde, double tol,
                                   bool with_vectors = false);

/// Number of eigenvalues in [-tol, tol]; zero certifies hyperbolicity.
std::size_t eigenvalues_near_zero(const SymTridiag& t, double tol);

}  // namespace hetflow
