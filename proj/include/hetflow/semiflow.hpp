#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "hetflow/grid.hpp"
#include "hetflow/model.hpp"
#include "hetflow/tridiag.hpp"

namespace hetflow {

enum class RunStatus { completed, blowup_guard, converged_to_equilibrium };

const char* to_string(RunStatus s) noexcept;

struct Monitors {
  /// Cutoff radii k whose tail masses are recorded.
  std::vector<double> k_list;
  /// Stop with blowup_guard once the H1 norm exceeds this.
  double r_cap = std::numeric_limits<double>::infinity();
  /// Stop once ||(u+ - u)/dt|| < conv_factor * (1 + ||u||_H1) for conv_window steps.
  bool stop_on_convergence = false;
  double conv_factor = 1e-8;
  int conv_window = 10;
  /// Record the series every series_stride steps (first and last always kept).
  std::size_t series_stride = 1;
  /// Keep a state snapshot every state_stride steps; 0 keeps initial and final only.
  std::size_t state_stride = 0;
  /// Per-step tolerance on energy increase is energy_tol_factor * (1 + |V(u0)|).
  double energy_tol_factor = 1e-8;
  double dt_max = std::numeric_limits<double>::infinity();
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> h1;
  std::vector<double> energy;
  /// -||(u+ - u)/dt||^2, the discrete counterpart of dV/dt.
  std::vector<double> dv_proxy;
  std::vector<double> k_list;
  /// tails[k][step]
  std::vector<std::vector<double>> tails;

  std::vector<double> state_times;
  std::vector<Field> states;

  RunStatus status = RunStatus::completed;
  std::size_t steps = 0;
  double dt = 0.0;
  double max_energy_increase = 0.0;
  double energy_tol = 0.0;
  double max_h1 = 0.0;

  const Field& initial_state() const { return states.front(); }
  const Field& final_state() const { return states.back(); }
  double final_time() const { return state_times.back(); }
};

/// IMEX Euler for u' + A u = F(u): the operator and the nonnegative linear
/// damping k(x) = -min(0, alpha, gamma) are implicit, the rest of F explicit:
///   (I + dt (A + k)) u+ = u + dt (F(u) + k u).
/// Linear dissipative models are therefore integrated by backward Euler.
class ImexStepper {
 public:
  ImexStepper(const NonlinearityModel& model, const TridiagOperator& op, double dt);
  ImexStepper(NodalModel model, const TridiagOperator& op, double dt);

  /// Advances u (grid representation) by one step in place.
  void step(std::span<double> u) const;
  Field step(const Field& u) const;

  double dt() const noexcept { return dt_; }
  const NodalModel& model() const noexcept { return model_; }
  const TridiagOperator& op() const noexcept { return op_; }
  /// dt * Lip(explicit part); the stability precheck requires <= 1/2.
  double stability_number() const noexcept { return dt_ * lipschitz_; }

 private:
  NodalModel model_;
  TridiagOperator op_;
  double dt_;
  double lipschitz_;
  bool unit_scale_;
  SpdTridiagFactor factor_;
};

Field step_imex(const Field& u, const NonlinearityModel& m, const TridiagOperator& op, double dt);

/// Largest step <= dt that passes the stability precheck on this grid.
double stable_step(const NonlinearityModel& m, const Grid& grid, double dt);

/// Integrates on [0, T] with n = ceil(T/dt) steps of size dt (the last one
/// shortened when T/dt is not an integer). Throws std::invalid_argument when
/// dt violates the stability precheck or dt_max.
TrajectoryRecord evolve(const Field& u0, const NonlinearityModel& m, const TridiagOperator& op,
                        double T, double dt, const Monitors& monitors = {});

/// V(u) = 1/2 |grad u|^2 - sum w_i P(x_i, u_i).
double energy(const Field& u, const NonlinearityModel& m);
double energy(const Field& u, const NodalModel& m);

/// Largest one-step energy increase seen along the record.
double dissipation_check(const TrajectoryRecord& rec);

struct TailConstant {
  double k = 0.0;
  double gradient_term = 0.0;
  double b_term = 0.0;
  double c_term = 0.0;
  /// (gradient_term + b_term + c_term) / nu
  double alpha_k = 0.0;
};

/// Constant of the asymptotic-localization bound
///   sum w theta_k u(t)^2 <= R^2 exp(-2 nu t) + alpha_k
/// with gradient term 2 sqrt(2) D R^2 / k, b term bounding sum w theta_k b |u|^q
/// and c term sum w theta_k c.
TailConstant tail_constant(const Grid& grid, const NonlinearityModel& m, double nu, double R,
                           double k);

/// margin_k = max_t [tail_k(t) - R^2 exp(-2 nu t) - alpha_k]; nonpositive
/// margins verify the bound. Every k must be one of the record's monitored
/// radii. Throws PreconditionError for an uncertified model or R < sup ||u||_H1.
std::vector<double> tail_bound_check(const TrajectoryRecord& rec, const NonlinearityModel& m,
                                     const DissipativityCertificate& cert, double R,
                                     std::span<const double> k_list);

struct ConvergenceCase {
  NonlinearityModel model;
  Field u0;
};

struct ConvergenceResult {
  /// sup over sampled t in [delta, T] of ||u_j(t) - u(t)||_H1
  std::vector<double> sup_error;
  std::vector<double> initial_l2;
  std::vector<double> initial_h1;
  double growth_constant = 0.0;
};

/// Evolves the limit problem and every member of the family with the same
/// step schedule and compares them on [delta, T]. Throws PreconditionError
/// when the members do not share the limit's growth constant.
ConvergenceResult convergence_experiment(const NonlinearityModel& limit, const Field& u0,
                                         std::span<const ConvergenceCase> family,
                                         const TridiagOperator& op, double delta, double T,
                                         double dt);

struct AdmissibilityOptions {
  /// Radius of the ball N; 0 takes the largest H1 norm seen on any trajectory.
  double R = 0.0;
  double k = 1.0;
  double tau = 1.0;
  double dt = 1e-2;
  /// Number of trailing endpoints whose diameter is reported.
  std::size_t window = 10;
};

struct EndpointEntry {
  double t = 0.0;
  double tail = 0.0;
  double bound = 0.0;
  double max_h1 = 0.0;
  bool within_bound = false;
  /// Trajectory left the ball ||u||_H1 <= R and is not part of the test.
  bool excluded = false;
};

struct AdmissibilityReport {
  std::vector<EndpointEntry> entries;
  std::vector<Field> endpoints;
  double R = 0.0;
  double alpha_k = 0.0;
  /// l2 diameter of the last `window` endpoints.
  double diameter = 0.0;
  /// Same after removing tails, i.e. of (1 - theta_k) u.
  double core_diameter = 0.0;
  /// t_j strictly increasing and eventually beyond tau.
  bool durations_diverge = false;
  bool all_within_bound = false;
  std::size_t excluded = 0;
};

AdmissibilityReport admissibility_experiment(std::span<const Field> u0s,
                                             std::span<const double> durations,
                                             const NonlinearityModel& m, const TridiagOperator& op,
                                             const DissipativityCertificate& cert,
                                             const AdmissibilityOptions& opt);

}  // namespace hetflow
