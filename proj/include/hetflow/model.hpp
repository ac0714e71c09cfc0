#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hetflow/grid.hpp"

namespace hetflow {

enum class WellKind { zero, gaussian, square };

/// Radially symmetric bounded perturbation: amplitude * exp(-|x|^2/width^2)
/// (gaussian) or amplitude * 1{|x| < width} (square well).
struct Well {
  WellKind kind = WellKind::zero;
  double amplitude = 0.0;
  double width = 1.0;

  double value(double abs_x) const noexcept;
  double sup_abs() const noexcept;

  static Well zero() { return {}; }
  static Well gaussian(double amplitude, double width) {
    return {WellKind::gaussian, amplitude, width};
  }
  static Well square(double depth, double radius) { return {WellKind::square, depth, radius}; }
};

/// Slope profile -base_level + well(x).
struct PotentialSpec {
  double base_level = 1.0;
  Well well;

  double value(double abs_x) const noexcept { return -base_level + well.value(abs_x); }
};

/// constant + sum of wells. Closed under the affine blends the experiments
/// need (homotopies, perturbation families).
struct Profile {
  double constant = 0.0;
  std::vector<Well> wells;

  static Profile from(const PotentialSpec& spec);
  static Profile uniform(double c) { return Profile{c, {}}; }

  double value(double abs_x) const noexcept;
  /// Upper bound for sup |value| from the term magnitudes.
  double sup_abs_bound() const noexcept;
  bool is_zero() const noexcept;

  Profile scaled(double factor) const;
  Profile plus(const Profile& other) const;
};

/// Data of the dissipativity inequality F(x,u)u <= -nu|u|^2 + b(x)|u|^q + c(x).
struct DissipativityData {
  double nu = 1.0;
  double q = 2.0;
  /// When set, b(x) = max(0, max(alpha(x), gamma(x)) + nu), which makes the
  /// inequality hold with c = 0 for the switch family (q = 2).
  bool b_auto = true;
  Profile b;
  Profile c;
};

/// Arrays of the model sampled on one grid, used by the hot loops.
struct NodalModel {
  Grid grid;
  std::vector<double> alpha;
  std::vector<double> gamma;
  std::vector<double> forcing;
  /// Nonnegative linear damping -min(0, alpha, gamma), treated implicitly.
  std::vector<double> damping;
  double switch_scale = 1.0;

  std::size_t size() const noexcept { return alpha.size(); }
  double F(std::size_t i, double u) const noexcept;
  double dF(std::size_t i, double u) const noexcept;
  double P(std::size_t i, double u) const noexcept;
  /// sup over nodes and u of |dF + damping|.
  double explicit_lipschitz_bound() const noexcept;
};

/// F(x,u) = gamma(x) u + (alpha(x) - gamma(x)) u psi(u/s0) + f(x) with
/// psi(v) = v^2/(1+v^2). F'_u(x,0) = gamma(x), F(x,u)/u -> alpha(x) as |u| -> inf.
class NonlinearityModel {
 public:
  NonlinearityModel(Profile alpha, Profile gamma, double switch_scale, Profile forcing = {},
                    DissipativityData dissipativity = {});

  double alpha(double x) const noexcept { return alpha_.value(x < 0 ? -x : x); }
  double gamma(double x) const noexcept { return gamma_.value(x < 0 ? -x : x); }
  double forcing(double x) const noexcept { return forcing_.value(x < 0 ? -x : x); }
  double b(double x) const noexcept;
  double c(double x) const noexcept;

  double F(double x, double u) const noexcept;
  double dF(double x, double u) const noexcept;
  double P(double x, double u) const noexcept;

  const Profile& alpha_profile() const noexcept { return alpha_; }
  const Profile& gamma_profile() const noexcept { return gamma_; }
  const Profile& forcing_profile() const noexcept { return forcing_; }
  double switch_scale() const noexcept { return s0_; }
  const DissipativityData& dissipativity() const noexcept { return diss_; }

  /// Analytic bound C with |F'_u| <= C everywhere (growth condition, beta = 0).
  double derivative_bound() const noexcept;
  /// sup |alpha - gamma| bound from the profile terms.
  double slope_gap_bound() const noexcept;

  /// G = F + extra(x), a u-independent source.
  NonlinearityModel with_forcing(const Profile& extra) const;
  /// lambda*F + (1-lambda)*alpha(x)*u, again a switch model.
  NonlinearityModel homotopy_to_linear(double lambda) const;
  NonlinearityModel with_dissipativity(DissipativityData d) const;

  NodalModel sample(const Grid& grid) const;

 private:
  Profile alpha_;
  Profile gamma_;
  Profile forcing_;
  double s0_;
  DissipativityData diss_;
};

/// Throws std::invalid_argument when s0 <= 0 or a base level is not positive.
NonlinearityModel build_switch_model(const PotentialSpec& alpha, const PotentialSpec& gamma,
                                     double switch_scale);
NonlinearityModel build_switch_model(const PotentialSpec& alpha, const PotentialSpec& gamma,
                                     double switch_scale, DissipativityData dissipativity);

/// F(x,u) = slope(x) u; slope may have any sign (no base-level requirement).
NonlinearityModel make_linear_model(const Profile& slope, DissipativityData dissipativity = {});

/// Switch-function pieces, exposed for tests.
double switch_psi(double v) noexcept;
/// d/dv [v psi(v)] = (v^4 + 3v^2)/(1+v^2)^2, with values in [0, 9/8].
double switch_dpsi(double v) noexcept;
/// v^2 - log(1 + v^2), accurate for small v.
double switch_energy(double v) noexcept;

struct DissipativityCertificate {
  double nu = 0.0;
  double max_violation = 0.0;
  /// Largest |term| seen, sets the rounding tolerance for certification.
  double scale = 0.0;
  std::size_t samples = 0;

  bool certified() const noexcept;
};

/// max over the lattice of F(x,u)u + nu|u|^2 - b(x)|u|^q - c(x).
DissipativityCertificate check_dissipativity(const NonlinearityModel& m,
                                             std::span<const double> x_samples,
                                             std::span<const double> u_samples);

struct SlopeDeviation {
  double dev_inf = 0.0;
  double dev_zero = 0.0;
  /// max |F(x,u_small)/u_small - gamma(x)|, a secant sanity check.
  double dev_small = 0.0;
};

SlopeDeviation check_asymptotic_slopes(const NonlinearityModel& m,
                                       std::span<const double> x_samples, double u_large,
                                       double u_small);

struct GrowthCheck {
  double bound = 0.0;
  double max_abs_derivative = 0.0;

  bool certified() const noexcept { return max_abs_derivative <= bound * (1.0 + 1e-12); }
};

/// Samples |F'_u| against derivative_bound().
GrowthCheck check_growth(const NonlinearityModel& m, std::span<const double> x_samples,
                         std::span<const double> u_samples);

/// n evenly spaced points on [lo, hi].
std::vector<double> lattice(double lo, double hi, std::size_t n);

}  // namespace hetflow
