#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hetflow/equilibria.hpp"
#include "hetflow/semiflow.hpp"

namespace hetflow {

struct ConnectOptions {
  /// Base level used for the spectral cutoff nu_tilde / 2; 0 takes the
  /// smaller base level of the model.
  double nu_tilde = 0.0;
  /// Non-resonance threshold at zero; 0 selects 10 h^2.
  double resonance_tol = 0.0;
  double eps_seed = 1e-3;
  double T_max = 500.0;
  double dt = 0.05;
  /// Terminal states match an equilibrium within conn_factor * (1 + ||e||_H1).
  double conn_factor = 1e-6;
  /// Keep every series_stride-th sample of the trajectory series.
  std::size_t series_stride = 10;
  NewtonOptions newton;
};

struct ConnectionRecord {
  Equilibrium source;
  Equilibrium target;
  std::size_t target_id = 0;
  Field seed_direction;
  int sign = 1;
  double eigenvalue = 0.0;
  TrajectoryRecord trajectory;
  /// V(source) - V(target)
  double energy_drop = 0.0;
  /// Terminal H1 distance to the target.
  double closeness = 0.0;
  double conn_tol = 0.0;
  /// Index of the unstable direction at 0 the seed followed.
  int direction = 0;

  bool energy_monotone() const noexcept {
    return trajectory.max_energy_increase <= trajectory.energy_tol;
  }
  /// energy_drop > 0, closeness <= conn_tol, monotone energy, nontrivial target.
  bool valid() const noexcept {
    return energy_drop > 0.0 && closeness <= conn_tol && energy_monotone() && !target.trivial;
  }
};

/// Outcome of one seeded trajectory, whether or not it produced a record.
struct ConnectionAttempt {
  int direction = 0;
  int sign = 1;
  RunStatus status = RunStatus::completed;
  std::optional<std::size_t> target_id;
  std::string outcome;
};

struct ConnectionSearch {
  std::size_t m = 0;
  std::size_t m_prime = 0;
  std::vector<ConnectionRecord> records;
  std::vector<ConnectionAttempt> attempts;
  /// m != m' and no attempt produced a valid record.
  bool falsified() const noexcept { return records.empty(); }
};

/// Census entry matching the terminal state of rec after Newton polishing,
/// appending the polished equilibrium when it is new. Empty when the
/// trajectory never settled or polishing fails.
std::optional<std::size_t> classify_limit(const TrajectoryRecord& rec, const NonlinearityModel& m,
                                          const TridiagOperator& op,
                                          std::vector<Equilibrium>& census,
                                          const ConnectOptions& opt = {});

/// Evolves from +-eps * v for every unstable eigenvector v of the
/// linearization at 0 and records the connections to nontrivial equilibria.
/// Throws PreconditionError when 0 is not an equilibrium, the linearization
/// at 0 is not certified non-resonant, m' = 0, or m = m'.
ConnectionSearch heteroclinic_search(const NonlinearityModel& m, const TridiagOperator& op,
                                     std::vector<Equilibrium>& census,
                                     const ConnectOptions& opt = {});

/// Smaller of the base levels of alpha and gamma (minus the constant parts).
double base_level(const NonlinearityModel& m);

}  // namespace hetflow
