#include "hetflow/connect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "hetflow/errors.hpp"
#include "hetflow/spectrum.hpp"

namespace hetflow {

double base_level(const NonlinearityModel& m) {
  return std::min(-m.alpha_profile().constant, -m.gamma_profile().constant);
}

std::optional<std::size_t> classify_limit(const TrajectoryRecord& rec, const NonlinearityModel& m,
                                          const TridiagOperator& op,
                                          std::vector<Equilibrium>& census,
                                          const ConnectOptions& opt) {
  if (rec.status != RunStatus::converged_to_equilibrium) return std::nullopt;
  Equilibrium polished = [&]() -> Equilibrium {
    try {
      return newton_solve(rec.final_state(), m, op, opt.newton);
    } catch (const NewtonFailure&) {
      return classify_equilibrium(rec.final_state(), m, op, opt.newton);
    }
  }();
  if (!(polished.residual <= 1e-9 * (1.0 + polished.h1_norm))) return std::nullopt;
  const std::ptrdiff_t hit = match_equilibrium(polished.u_star, census, opt.conn_factor);
  if (hit >= 0) return static_cast<std::size_t>(hit);
  census.push_back(std::move(polished));
  return census.size() - 1;
}

ConnectionSearch heteroclinic_search(const NonlinearityModel& m, const TridiagOperator& op,
                                     std::vector<Equilibrium>& census,
                                     const ConnectOptions& opt) {
  const Grid& g = op.grid();
  if (!m.forcing_profile().is_zero()) {
    throw PreconditionError("heteroclinic search: 0 is not an equilibrium (nonzero forcing)");
  }
  const double nu_tilde = opt.nu_tilde > 0.0 ? opt.nu_tilde : base_level(m);
  if (!(nu_tilde > 0.0)) throw PreconditionError("heteroclinic search: base level must be positive");
  const double tol = opt.resonance_tol > 0.0 ? opt.resonance_tol : default_resonance_tol(g);

  std::vector<double> ga(g.size()), al(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    ga[i] = -m.gamma(g.node(i));
    al[i] = -m.alpha(g.node(i));
  }
  const TridiagOperator at_zero = op.with_potential(ga);
  const TridiagOperator at_inf = op.with_potential(al);
  SpectralReport zero = nonresonance_report(at_zero, nu_tilde, tol, true);
  const SpectralReport inf = nonresonance_report(at_inf, nu_tilde, tol, false);

  ConnectionSearch out;
  out.m = inf.count_negative;
  out.m_prime = zero.count_negative;
  if (!zero.certified()) {
    throw PreconditionError("heteroclinic search: linearization at 0 is resonant (kernel gap " +
                            std::to_string(zero.kernel_gap) + " < " + std::to_string(tol) + ")");
  }
  if (out.m_prime == 0) {
    throw PreconditionError("heteroclinic search: 0 has no unstable direction (m' = 0)");
  }
  if (out.m == out.m_prime) {
    throw PreconditionError("heteroclinic search: m = m' = " + std::to_string(out.m));
  }

  Equilibrium source = [&] {
    for (const auto& e : census) {
      if (e.trivial) return e;
    }
    return classify_equilibrium(Field(g), m, op, opt.newton);
  }();

  struct Run {
    int direction;
    int sign;
    Field seed;
    std::optional<TrajectoryRecord> rec;
    std::string error;
  };
  std::vector<Run> runs;
  for (std::size_t d = 0; d < zero.eigenvectors.size(); ++d) {
    for (int sign : {1, -1}) {
      runs.push_back({static_cast<int>(d), sign, (sign * opt.eps_seed) * Field(zero.eigenvectors[d]),
                      std::nullopt, {}});
    }
  }

  Monitors mon;
  mon.stop_on_convergence = true;
  mon.series_stride = opt.series_stride;
  mon.r_cap = 1e6;
  const double dt = stable_step(m, g, opt.dt);
  const auto n = static_cast<std::int64_t>(runs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k) {
    Run& r = runs[static_cast<std::size_t>(k)];
    try {
      r.rec = evolve(r.seed, m, op, opt.T_max, dt, mon);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  }

  // Census updates happen here, serially and in run order.
  for (Run& r : runs) {
    ConnectionAttempt a;
    a.direction = r.direction;
    a.sign = r.sign;
    if (!r.rec) {
      a.outcome = "error: " + r.error;
      out.attempts.push_back(std::move(a));
      continue;
    }
    a.status = r.rec->status;
    a.target_id = classify_limit(*r.rec, m, op, census, opt);
    if (!a.target_id) {
      a.outcome = "nonconvergent";
      out.attempts.push_back(std::move(a));
      continue;
    }
    const Equilibrium& target = census[*a.target_id];
    ConnectionRecord c{source,
                       target,
                       *a.target_id,
                       zero.eigenvectors[static_cast<std::size_t>(r.direction)],
                       r.sign,
                       zero.eigenvalues_below_cutoff[static_cast<std::size_t>(r.direction)],
                       std::move(*r.rec)};
    c.direction = r.direction;
    c.energy_drop = source.energy - target.energy;
    c.closeness = h1_distance(c.trajectory.final_state(), target.u_star);
    c.conn_tol = opt.conn_factor * (1.0 + target.h1_norm);
    if (target.trivial) {
      a.outcome = "returned to 0";
    } else if (!c.valid()) {
      a.outcome = "invariant violated";
    } else {
      a.outcome = "connection";
    }
    if (c.valid()) out.records.push_back(std::move(c));
    out.attempts.push_back(std::move(a));
  }
  return out;
}

}  // namespace hetflow
