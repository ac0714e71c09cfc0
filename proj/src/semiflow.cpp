#include "hetflow/semiflow.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "hetflow/errors.hpp"
#include "hetflow/kernels.hpp"

namespace hetflow {

const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::completed:
      return "completed";
    case RunStatus::blowup_guard:
      return "blowup_guard";
    case RunStatus::converged_to_equilibrium:
      return "converged_to_equilibrium";
  }
  return "unknown";
}

namespace {

bool is_unit(std::span<const double> s) {
  return std::all_of(s.begin(), s.end(), [](double v) { return v == 1.0; });
}

}  // namespace

ImexStepper::ImexStepper(const NonlinearityModel& model, const TridiagOperator& op, double dt)
    : ImexStepper(model.sample(op.grid()), op, dt) {}

ImexStepper::ImexStepper(NodalModel model, const TridiagOperator& op, double dt)
    : model_(std::move(model)),
      op_(op),
      dt_(dt),
      lipschitz_(model_.explicit_lipschitz_bound()),
      unit_scale_(is_unit(op.scale())),
      factor_(op.matrix(), model_.damping, dt) {
  if (!(model_.grid == op.grid())) throw GridMismatch();
}

void ImexStepper::step(std::span<double> u) const {
  const std::size_t n = u.size();
  std::vector<double> rhs(n);
  kernels::explicit_part(model_, u, rhs);
  const auto s = op_.scale();
  if (unit_scale_) {
    for (std::size_t i = 0; i < n; ++i) rhs[i] = u[i] + dt_ * rhs[i];
    factor_.solve_in_place(rhs);
    std::copy(rhs.begin(), rhs.end(), u.begin());
  } else {
    for (std::size_t i = 0; i < n; ++i) rhs[i] = s[i] * (u[i] + dt_ * rhs[i]);
    factor_.solve_in_place(rhs);
    for (std::size_t i = 0; i < n; ++i) u[i] = rhs[i] / s[i];
  }
}

Field ImexStepper::step(const Field& u) const {
  if (!(u.grid() == op_.grid())) throw GridMismatch();
  std::vector<double> v(u.values().begin(), u.values().end());
  step(std::span<double>(v));
  return Field(u.grid(), std::move(v));
}

Field step_imex(const Field& u, const NonlinearityModel& m, const TridiagOperator& op, double dt) {
  return ImexStepper(m, op, dt).step(u);
}

double stable_step(const NonlinearityModel& m, const Grid& grid, double dt) {
  const double lip = m.sample(grid).explicit_lipschitz_bound();
  return lip > 0.0 ? std::min(dt, 0.5 / lip) : dt;
}

double energy(const Field& u, const NodalModel& m) {
  const Grid& g = u.grid();
  return 0.5 * h1_seminorm_sq(u) - kernels::potential_energy(m, g.cell_weights(), u.values());
}

double energy(const Field& u, const NonlinearityModel& m) { return energy(u, m.sample(u.grid())); }

namespace {

struct Sample {
  double l2sq;
  double h1;
  double energy;
};

Sample measure(const Grid& g, const NodalModel& m, std::span<const double> u) {
  const double l2sq = kernels::weighted_dot(g.cell_weights(), u, u);
  const double semi = kernels::face_energy(g.face_weights(), g.spacing(), u);
  const double pot = kernels::potential_energy(m, g.cell_weights(), u);
  return {l2sq, std::sqrt(l2sq + semi), 0.5 * semi - pot};
}

double weighted_tail(const Grid& g, std::span<const double> theta, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += g.cell_weight(i) * theta[i] * u[i] * u[i];
  return s;
}

}  // namespace

TrajectoryRecord evolve(const Field& u0, const NonlinearityModel& m, const TridiagOperator& op,
                        double T, double dt, const Monitors& mon) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("evolve: T must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  if (dt > mon.dt_max) {
    throw std::invalid_argument("evolve: dt " + std::to_string(dt) + " exceeds dt_max " +
                                std::to_string(mon.dt_max));
  }
  if (!(u0.grid() == op.grid())) throw GridMismatch();
  const Grid& g = u0.grid();
  const ImexStepper stepper(m.sample(g), op, dt);
  if (stepper.stability_number() > 0.5) {
    throw std::invalid_argument("evolve: dt * Lip(explicit part) = " +
                                std::to_string(stepper.stability_number()) + " exceeds 1/2");
  }
  const NodalModel& nm = stepper.model();

  const auto n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(T / dt - 1e-9)));
  const double last_dt = T - static_cast<double>(n_steps - 1) * dt;
  std::optional<ImexStepper> last_stepper;
  if (std::abs(last_dt - dt) > 1e-12 * dt) last_stepper.emplace(nm, op, last_dt);

  std::vector<Field> thetas;
  for (double k : mon.k_list) thetas.push_back(cutoff_weights(g, k));

  TrajectoryRecord rec;
  rec.dt = dt;
  rec.k_list = mon.k_list;
  rec.tails.resize(mon.k_list.size());
  rec.max_energy_increase = -std::numeric_limits<double>::infinity();

  std::vector<double> u(u0.values().begin(), u0.values().end());
  std::vector<double> prev(u.size());
  Sample cur = measure(g, nm, u);
  rec.energy_tol = mon.energy_tol_factor * (1.0 + std::abs(cur.energy));
  rec.max_h1 = cur.h1;

  auto push_series = [&](double t, const Sample& s, double dv) {
    rec.times.push_back(t);
    rec.l2.push_back(std::sqrt(s.l2sq));
    rec.h1.push_back(s.h1);
    rec.energy.push_back(s.energy);
    rec.dv_proxy.push_back(dv);
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      rec.tails[k].push_back(weighted_tail(g, thetas[k].values(), u));
    }
  };
  push_series(0.0, cur, 0.0);
  rec.states.push_back(u0);
  rec.state_times.push_back(0.0);

  int settled = 0;
  double t = 0.0;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const bool last = k == n_steps;
    const ImexStepper& st = (last && last_stepper) ? *last_stepper : stepper;
    std::copy(u.begin(), u.end(), prev.begin());
    st.step(u);
    t = last ? T : static_cast<double>(k) * dt;

    double du2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = u[i] - prev[i];
      du2 += g.cell_weight(i) * d * d;
    }
    const double rate = std::sqrt(du2) / st.dt();
    const Sample next = measure(g, nm, u);
    rec.steps = k;

    if (!std::isfinite(next.h1) || next.h1 > mon.r_cap) {
      rec.status = RunStatus::blowup_guard;
      // Keep the last finite state as the endpoint.
      if (!std::isfinite(next.h1)) std::copy(prev.begin(), prev.end(), u.begin());
      if (std::isfinite(next.h1)) {
        rec.max_h1 = std::max(rec.max_h1, next.h1);
        push_series(t, next, -rate * rate);
      }
      break;
    }
    rec.max_energy_increase = std::max(rec.max_energy_increase, next.energy - cur.energy);
    rec.max_h1 = std::max(rec.max_h1, next.h1);
    cur = next;

    if (rate < mon.conv_factor * (1.0 + next.h1)) {
      ++settled;
    } else {
      settled = 0;
    }
    const bool stop = mon.stop_on_convergence && settled >= mon.conv_window;
    if (stop) rec.status = RunStatus::converged_to_equilibrium;

    const std::size_t stride = std::max<std::size_t>(1, mon.series_stride);
    if (last || stop || k % stride == 0) push_series(t, next, -rate * rate);
    if (!last && !stop && mon.state_stride > 0 && k % mon.state_stride == 0) {
      rec.states.emplace_back(g, u);
      rec.state_times.push_back(t);
    }
    if (stop) break;
  }
  if (rec.times.back() != t && rec.status != RunStatus::blowup_guard) {
    push_series(t, cur, rec.dv_proxy.back());
  }
  rec.states.emplace_back(g, u);
  rec.state_times.push_back(rec.status == RunStatus::blowup_guard && rec.steps > 0
                                ? rec.times.back()
                                : t);
  return rec;
}

double dissipation_check(const TrajectoryRecord& rec) {
  if (rec.steps == 0) return 0.0;
  double worst = rec.max_energy_increase;
  for (std::size_t i = 1; i < rec.energy.size(); ++i) {
    worst = std::max(worst, rec.energy[i] - rec.energy[i - 1]);
  }
  return worst;
}

TailConstant tail_constant(const Grid& grid, const NonlinearityModel& m, double nu, double R,
                           double k) {
  if (!(nu > 0.0) || !(R >= 0.0) || !(k > 0.0)) {
    throw std::invalid_argument("tail_constant: need nu > 0, R >= 0, k > 0");
  }
  const double D = ramp_derivative_bound();
  const Field theta = cutoff_weights(grid, k);
  const double q = m.dissipativity().q;

  TailConstant tc;
  tc.k = k;
  tc.gradient_term = 2.0 * std::sqrt(2.0) * D * R * R / k;

  double b_sup = 0.0;
  double b_mass = 0.0;
  double c_mass = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    const double w = grid.cell_weight(i) * theta[i];
    if (theta[i] > 0.0) b_sup = std::max(b_sup, std::abs(m.b(x)));
    b_mass += w * std::abs(m.b(x));
    c_mass += w * std::abs(m.c(x));
  }
  // sum w theta b |u|^q <= sup b * |u|_inf^(q-2) * |u|^2 and <= |u|_inf^q * sum w theta b;
  // on the line the discrete sup norm is bounded by the H1 norm, so |u|_inf <= R.
  double b_term = b_sup * std::pow(R, q);
  if (grid.mode() == DimMode::line) {
    b_term = std::min(b_term, std::pow(R, q) * b_mass);
  } else if (q != 2.0) {
    throw PreconditionError("tail bound in radial mode requires q = 2");
  }
  tc.b_term = b_term;
  tc.c_term = c_mass;
  tc.alpha_k = (tc.gradient_term + tc.b_term + tc.c_term) / nu;
  return tc;
}

std::vector<double> tail_bound_check(const TrajectoryRecord& rec, const NonlinearityModel& m,
                                     const DissipativityCertificate& cert, double R,
                                     std::span<const double> k_list) {
  if (!cert.certified()) {
    throw PreconditionError("tail bound check needs a model certified dissipative");
  }
  if (rec.max_h1 > R) {
    throw PreconditionError("tail bound check: R = " + std::to_string(R) +
                            " is below sup ||u||_H1 = " + std::to_string(rec.max_h1));
  }
  const Grid& g = rec.final_state().grid();
  const double nu = cert.nu;
  std::vector<double> margins;
  for (double k : k_list) {
    const auto it = std::find(rec.k_list.begin(), rec.k_list.end(), k);
    if (it == rec.k_list.end()) {
      throw std::invalid_argument("tail bound check: k = " + std::to_string(k) +
                                  " was not monitored");
    }
    const auto& tails = rec.tails[static_cast<std::size_t>(it - rec.k_list.begin())];
    const double alpha_k = tail_constant(g, m, nu, R, k).alpha_k;
    double margin = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < tails.size(); ++s) {
      const double t = rec.times[s] - rec.times.front();
      margin = std::max(margin, tails[s] - R * R * std::exp(-2.0 * nu * t) - alpha_k);
    }
    margins.push_back(margin);
  }
  return margins;
}

}  // namespace hetflow
