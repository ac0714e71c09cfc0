#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "hetflow/errors.hpp"
#include "hetflow/semiflow.hpp"

namespace hetflow {

namespace {

// Fixed-step schedule shared by all members of an experiment.
struct Schedule {
  std::size_t steps;
  double dt;
  double last_dt;

  Schedule(double T, double step) : dt(step) {
    steps = static_cast<std::size_t>(std::max(1.0, std::ceil(T / step - 1e-9)));
    last_dt = T - static_cast<double>(steps - 1) * step;
  }
  double time(std::size_t k) const {
    return k == steps ? static_cast<double>(steps - 1) * dt + last_dt
                      : static_cast<double>(k) * dt;
  }
};

// Integrates along the schedule, calling visit(k, u) after every step.
template <typename Visit>
void march(const Field& u0, const NonlinearityModel& m, const TridiagOperator& op,
           const Schedule& sched, Visit&& visit) {
  const ImexStepper main(m, op, sched.dt);
  if (main.stability_number() > 0.5) {
    throw std::invalid_argument("dt * Lip(explicit part) = " +
                                std::to_string(main.stability_number()) + " exceeds 1/2");
  }
  const bool uneven = std::abs(sched.last_dt - sched.dt) > 1e-12 * sched.dt;
  std::vector<double> u(u0.values().begin(), u0.values().end());
  for (std::size_t k = 1; k <= sched.steps; ++k) {
    if (k == sched.steps && uneven) {
      ImexStepper(main.model(), op, sched.last_dt).step(std::span<double>(u));
    } else {
      main.step(std::span<double>(u));
    }
    if (!visit(k, std::span<const double>(u))) return;
  }
}

}  // namespace

ConvergenceResult convergence_experiment(const NonlinearityModel& limit, const Field& u0,
                                         std::span<const ConvergenceCase> family,
                                         const TridiagOperator& op, double delta, double T,
                                         double dt) {
  if (!(delta >= 0.0) || !(T > delta) || !(dt > 0.0)) {
    throw std::invalid_argument("convergence experiment needs 0 <= delta < T and dt > 0");
  }
  ConvergenceResult res;
  res.growth_constant = limit.derivative_bound();
  for (const auto& c : family) {
    if (c.model.derivative_bound() > res.growth_constant * (1.0 + 1e-12)) {
      throw PreconditionError("family member exceeds the growth constant of the limit");
    }
    if (!(c.u0.grid() == u0.grid())) throw GridMismatch();
  }

  const Schedule sched(T, dt);
  const Grid& g = u0.grid();
  std::vector<std::vector<double>> reference;
  std::vector<std::size_t> sampled;
  march(u0, limit, op, sched, [&](std::size_t k, std::span<const double> u) {
    if (sched.time(k) >= delta - 1e-12) {
      reference.emplace_back(u.begin(), u.end());
      sampled.push_back(k);
    }
    return true;
  });

  const auto n = static_cast<std::int64_t>(family.size());
  res.sup_error.assign(family.size(), 0.0);
  res.initial_l2.resize(family.size());
  res.initial_h1.resize(family.size());
  std::vector<std::string> failures(family.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t j = 0; j < n; ++j) {
    const auto& c = family[static_cast<std::size_t>(j)];
    auto& err = res.sup_error[static_cast<std::size_t>(j)];
    res.initial_l2[static_cast<std::size_t>(j)] = l2_distance(c.u0, u0);
    res.initial_h1[static_cast<std::size_t>(j)] = h1_distance(c.u0, u0);
    try {
      std::size_t next = 0;
      march(c.u0, c.model, op, sched, [&](std::size_t k, std::span<const double> u) {
        if (next < sampled.size() && sampled[next] == k) {
          std::vector<double> d(u.begin(), u.end());
          for (std::size_t i = 0; i < d.size(); ++i) d[i] -= reference[next][i];
          const Field diff(g, std::move(d));
          err = std::max(err, norms(diff).h1);
          ++next;
        }
        return true;
      });
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(j)] = e.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw Error("convergence experiment: " + f);
  }
  return res;
}

AdmissibilityReport admissibility_experiment(std::span<const Field> u0s,
                                             std::span<const double> durations,
                                             const NonlinearityModel& m, const TridiagOperator& op,
                                             const DissipativityCertificate& cert,
                                             const AdmissibilityOptions& opt) {
  if (u0s.size() != durations.size() || u0s.empty()) {
    throw std::invalid_argument("admissibility experiment needs one duration per initial datum");
  }
  if (!cert.certified()) {
    throw PreconditionError("admissibility experiment needs a model certified dissipative");
  }
  const Grid& g = op.grid();
  const double nu = cert.nu;
  AdmissibilityReport rep;

  const std::size_t n = u0s.size();
  rep.entries.resize(n);
  rep.endpoints.assign(n, Field(g));
  std::vector<std::string> failures(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t jj = 0; jj < static_cast<std::int64_t>(n); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    EndpointEntry& e = rep.entries[j];
    e.t = durations[j];
    try {
      if (e.t <= 0.0) {
        rep.endpoints[j] = u0s[j];
        e.max_h1 = norms(u0s[j]).h1;
      } else {
        Monitors mon;
        if (opt.R > 0.0) mon.r_cap = opt.R;
        const TrajectoryRecord rec = evolve(u0s[j], m, op, e.t, opt.dt, mon);
        rep.endpoints[j] = rec.final_state();
        e.max_h1 = rec.max_h1;
        e.excluded = rec.status == RunStatus::blowup_guard;
      }
      e.tail = tail_mass(rep.endpoints[j], opt.k);
    } catch (const std::exception& ex) {
      failures[j] = ex.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw Error("admissibility experiment: " + f);
  }

  rep.R = opt.R;
  if (rep.R <= 0.0) {
    for (const auto& e : rep.entries) rep.R = std::max(rep.R, e.max_h1);
  }
  rep.alpha_k = tail_constant(g, m, nu, rep.R, opt.k).alpha_k;
  for (auto& e : rep.entries) {
    e.excluded = e.excluded || e.max_h1 > rep.R;
    e.bound = rep.R * rep.R * std::exp(-2.0 * nu * (e.t - opt.tau)) + rep.alpha_k;
    e.within_bound = e.tail <= e.bound;
  }

  rep.all_within_bound = true;
  for (const auto& e : rep.entries) {
    if (e.excluded) {
      ++rep.excluded;
    } else if (!e.within_bound) {
      rep.all_within_bound = false;
    }
  }
  rep.durations_diverge = durations.back() > opt.tau;
  for (std::size_t j = 1; j < n; ++j) {
    if (!(durations[j] > durations[j - 1])) rep.durations_diverge = false;
  }

  // Diameters over the trailing window of admitted endpoints.
  const Field theta = cutoff_weights(g, opt.k);
  std::vector<const Field*> tail_window;
  for (std::size_t j = n; j-- > 0 && tail_window.size() < opt.window;) {
    if (!rep.entries[j].excluded) tail_window.push_back(&rep.endpoints[j]);
  }
  for (std::size_t a = 0; a < tail_window.size(); ++a) {
    for (std::size_t b = a + 1; b < tail_window.size(); ++b) {
      const Field d = *tail_window[a] - *tail_window[b];
      rep.diameter = std::max(rep.diameter, l2_norm(d));
      Field core = d;
      for (std::size_t i = 0; i < core.size(); ++i) core[i] *= 1.0 - theta[i];
      rep.core_diameter = std::max(rep.core_diameter, l2_norm(core));
    }
  }
  return rep;
}

}  // namespace hetflow
