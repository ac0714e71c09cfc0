#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hetflow/errors.hpp"
#include "hetflow/grid.hpp"
#include "hetflow/model.hpp"
#include "hetflow/tridiag.hpp"

namespace hetflow {

/// Stationary solution of A u = F(x, u).
struct Equilibrium {
  explicit Equilibrium(Field u) : u_star(std::move(u)) {}

  Field u_star;
  /// Weighted l2 norm of A u - F(u).
  double residual = 0.0;
  std::size_t morse_index = 0;
  bool hyperbolic = false;
  double energy = 0.0;
  double h1_norm = 0.0;
  bool trivial = false;
  std::size_t iterations = 0;
  std::vector<double> residual_history;
};

class NewtonFailure : public Error {
 public:
  enum class Kind { max_iterations, singular_jacobian };

  NewtonFailure(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct NewtonOptions {
  /// Converged when residual <= tol * (1 + ||u||_H1).
  double tol = 1e-10;
  int max_iterations = 60;
  /// Smallest damping factor tried before a full step is forced.
  double min_damping = 1.0 / 1024.0;
  /// Equilibria with ||u||_H1 below this are flagged trivial.
  double trivial_tol = 1e-3;
};

/// A u - F(u) in the grid representation.
Field equilibrium_residual(const Field& u, const NonlinearityModel& m, const TridiagOperator& op);

/// Linearization A - diag(F'_u(x, u)).
TridiagOperator linearization(const Field& u, const NonlinearityModel& m,
                              const TridiagOperator& op);

/// Damped Newton iteration. Throws NewtonFailure on a singular Jacobian or
/// when the iteration limit is reached.
Equilibrium newton_solve(const Field& u0, const NonlinearityModel& m, const TridiagOperator& op,
                         const NewtonOptions& opt = {});

/// Fills residual, Morse index, hyperbolicity, energy and norms for a
/// converged state.
Equilibrium classify_equilibrium(const Field& u, const NonlinearityModel& m,
                                 const TridiagOperator& op, const NewtonOptions& opt = {});

/// Number of negative eigenvalues of the linearization at u.
std::size_t morse_index(const Field& u, const NonlinearityModel& m, const TridiagOperator& op);

struct SeedStrategy {
  /// Scale of the eigenvector seeds.
  double eps = 0.5;
  std::size_t random_seeds = 16;
  std::uint64_t rng_seed = 1;
  /// Peak magnitude of the random bump fields.
  double amplitude = 2.0;
  /// Each seed is also relaxed by the flow for this long before Newton.
  double preflow_time = 20.0;
  double dt = 0.02;
  /// Equilibria closer than dedup_factor * (1 + ||u||_H1) are merged.
  double dedup_factor = 1e-4;
  /// Re-verification: evolve for verify_time and require an H1 drift of at
  /// most stationarity_tol * (1 + ||u||_H1).
  double verify_time = 1.0;
  double stationarity_tol = 1e-8;
  NewtonOptions newton;
};

/// Smooth random field: a few gaussian bumps with magnitude at most amplitude.
Field random_bump_field(const Grid& grid, std::uint64_t seed, double amplitude);

/// Census of equilibria from seeds {0, +-eps * eigenvectors of both
/// linearizations, random bump fields}, deduplicated and sorted by energy.
/// Every entry passed the stationarity re-check.
std::vector<Equilibrium> find_equilibria(const NonlinearityModel& m, const TridiagOperator& op,
                                         const SeedStrategy& seeds = {});

/// Index of the census entry within factor * (1 + ||e||_H1) of u, or -1.
std::ptrdiff_t match_equilibrium(const Field& u, std::span<const Equilibrium> census,
                                 double factor);

struct HomotopyOptions {
  double T = 40.0;
  double dt = 0.02;
  double r_cap = 1e3;
  /// Scale of the seeds along unstable directions of each lambda-model.
  double eps = 1e-2;
};

struct HomotopyPoint {
  double lambda = 0.0;
  /// sup_t ||u||_H1 over the admitted trajectories.
  double sup_h1 = 0.0;
  std::size_t probes = 0;
  std::size_t unstable_directions = 0;
  std::size_t blowups = 0;
  /// Only meaningful at lambda = 0: every probe decreased monotonically in l2.
  bool monotone_decay = true;
  /// Largest final-to-initial l2 ratio over the probes.
  double decay_ratio = 0.0;
};

struct HomotopyScan {
  std::vector<HomotopyPoint> points;
  double R_observed = 0.0;
  std::size_t violations = 0;
  /// Largest ratio of sup_h1 between adjacent lambda values.
  double max_adjacent_ratio = 1.0;
};

/// Evolves the probes under lambda F + (1 - lambda) alpha u for every lambda
/// and records the observed a-priori bound.
HomotopyScan homotopy_bound_scan(const NonlinearityModel& m, const TridiagOperator& op,
                                 std::span<const double> lambdas, std::span<const Field> probes,
                                 const HomotopyOptions& opt = {});

}  // namespace hetflow
