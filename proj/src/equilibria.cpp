#include "hetflow/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "hetflow/kernels.hpp"
#include "hetflow/semiflow.hpp"
#include "hetflow/spectrum.hpp"

namespace hetflow {

namespace {

std::vector<double> derivative_at(const NodalModel& nm, std::span<const double> u) {
  std::vector<double> d(u.size());
  kernels::nemitski_derivative(nm, u, d);
  return d;
}

Field residual_of(const Field& u, const NodalModel& nm, const TridiagOperator& op) {
  Field r = apply(op, u);
  std::vector<double> f(u.size());
  kernels::nemitski(nm, u.values(), f);
  for (std::size_t i = 0; i < f.size(); ++i) r[i] -= f[i];
  return r;
}

Field scaled(const Field& v, double c) { return c * Field(v); }

}  // namespace

Field equilibrium_residual(const Field& u, const NonlinearityModel& m, const TridiagOperator& op) {
  if (!(u.grid() == op.grid())) throw GridMismatch();
  return residual_of(u, m.sample(u.grid()), op);
}

TridiagOperator linearization(const Field& u, const NonlinearityModel& m,
                              const TridiagOperator& op) {
  if (!(u.grid() == op.grid())) throw GridMismatch();
  std::vector<double> d = derivative_at(m.sample(u.grid()), u.values());
  for (double& v : d) v = -v;
  return op.with_potential(d);
}

std::size_t morse_index(const Field& u, const NonlinearityModel& m, const TridiagOperator& op) {
  return count_negative(linearization(u, m, op));
}

Equilibrium classify_equilibrium(const Field& u, const NonlinearityModel& m,
                                 const TridiagOperator& op, const NewtonOptions& opt) {
  Equilibrium e(u);
  e.residual = l2_norm(equilibrium_residual(u, m, op));
  const TridiagOperator j = linearization(u, m, op);
  e.morse_index = count_negative(j);
  e.hyperbolic = eigenvalues_near_zero(j.matrix(), default_resonance_tol(u.grid())) == 0;
  e.energy = energy(u, m);
  e.h1_norm = norms(u).h1;
  e.trivial = e.h1_norm < opt.trivial_tol;
  return e;
}

Equilibrium newton_solve(const Field& u0, const NonlinearityModel& m, const TridiagOperator& op,
                         const NewtonOptions& opt) {
  if (!(u0.grid() == op.grid())) throw GridMismatch();
  const NodalModel nm = m.sample(u0.grid());
  Field u = u0;
  Field r = residual_of(u, nm, op);
  double rn = l2_norm(r);
  std::vector<double> history{rn};

  for (int it = 0; it <= opt.max_iterations; ++it) {
    if (rn <= opt.tol * (1.0 + norms(u).h1)) {
      Equilibrium e = classify_equilibrium(u, m, op, opt);
      e.iterations = static_cast<std::size_t>(it);
      e.residual_history = std::move(history);
      return e;
    }
    if (it == opt.max_iterations) break;

    std::vector<double> d = derivative_at(nm, u.values());
    for (double& v : d) v = -v;
    Field step(u.grid());
    try {
      step = solve_shifted(op.with_potential(d), 0.0, -r);
    } catch (const SingularPivot& e) {
      throw NewtonFailure(NewtonFailure::Kind::singular_jacobian,
                          std::string("Newton: singular Jacobian, ") + e.what());
    }

    // Halve the step until the residual decreases.
    double lam = 1.0;
    for (;;) {
      Field trial = u + lam * Field(step);
      Field rt = residual_of(trial, nm, op);
      const double rtn = l2_norm(rt);
      if (rtn < rn || lam <= opt.min_damping) {
        u = std::move(trial);
        r = std::move(rt);
        rn = rtn;
        break;
      }
      lam *= 0.5;
    }
    history.push_back(rn);
  }
  throw NewtonFailure(NewtonFailure::Kind::max_iterations,
                      "Newton: no convergence in " + std::to_string(opt.max_iterations) +
                          " iterations, residual " + std::to_string(rn));
}

Field random_bump_field(const Grid& grid, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double L = grid.half_width();
  const bool line = grid.mode() == DimMode::line;
  constexpr int bumps = 3;
  double center[bumps], width[bumps], amp[bumps];
  for (int b = 0; b < bumps; ++b) {
    center[b] = line ? L * (unit(rng) - 0.5) : 0.5 * L * unit(rng);
    width[b] = 0.5 + 1.5 * unit(rng);
    amp[b] = amplitude * (2.0 * unit(rng) - 1.0) / bumps;
  }
  return Field::sample(grid, [&](double x) {
    double v = 0.0;
    for (int b = 0; b < bumps; ++b) {
      const double z = (x - center[b]) / width[b];
      v += amp[b] * std::exp(-z * z);
    }
    return v;
  });
}

std::ptrdiff_t match_equilibrium(const Field& u, std::span<const Equilibrium> census,
                                 double factor) {
  for (std::size_t i = 0; i < census.size(); ++i) {
    if (h1_distance(u, census[i].u_star) <= factor * (1.0 + census[i].h1_norm)) {
      return static_cast<std::ptrdiff_t>(i);
    }
  }
  return -1;
}

namespace {

std::vector<Field> unstable_directions(const TridiagOperator& lin) {
  std::vector<Field> out;
  const double tol = std::max(1e-13 * lin.norm(), 1e-14);
  for (double lam : eigenvalues_below(lin, 0.0, tol)) out.push_back(eigenvector(lin, lam));
  return out;
}

std::vector<Field> linear_seeds(const NonlinearityModel& m, const TridiagOperator& op,
                                double eps) {
  const Grid& g = op.grid();
  std::vector<Field> seeds;
  for (const Profile* p : {&m.gamma_profile(), &m.alpha_profile()}) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = -p->value(g.abs_node(i));
    for (const Field& d : unstable_directions(op.with_potential(v))) {
      seeds.push_back(scaled(d, eps));
      seeds.push_back(scaled(d, -eps));
    }
  }
  return seeds;
}

bool stationary(const Equilibrium& e, const NonlinearityModel& m, const TridiagOperator& op,
                const SeedStrategy& s) {
  const double dt = stable_step(m, op.grid(), s.dt);
  const TrajectoryRecord rec = evolve(e.u_star, m, op, s.verify_time, dt);
  return h1_distance(rec.final_state(), e.u_star) <= s.stationarity_tol * (1.0 + e.h1_norm);
}

}  // namespace

std::vector<Equilibrium> find_equilibria(const NonlinearityModel& m, const TridiagOperator& op,
                                         const SeedStrategy& s) {
  const Grid& g = op.grid();
  std::vector<Field> seeds{Field(g)};
  for (Field& f : linear_seeds(m, op, s.eps)) seeds.push_back(std::move(f));
  for (std::size_t i = 0; i < s.random_seeds; ++i) {
    seeds.push_back(random_bump_field(g, s.rng_seed + i, s.amplitude));
  }

  const double dt = stable_step(m, g, s.dt);
  Monitors relax;
  relax.stop_on_convergence = true;
  relax.r_cap = 1e6;

  // Each seed yields up to two candidates: Newton from the seed itself and
  // Newton after relaxing the seed along the flow.
  std::vector<std::vector<Equilibrium>> found(seeds.size());
  const auto n = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k) {
    const Field& seed = seeds[static_cast<std::size_t>(k)];
    auto& out = found[static_cast<std::size_t>(k)];
    try {
      out.push_back(newton_solve(seed, m, op, s.newton));
    } catch (const Error&) {
    }
    if (s.preflow_time > 0.0) {
      try {
        const TrajectoryRecord rec = evolve(seed, m, op, s.preflow_time, dt, relax);
        if (rec.status != RunStatus::blowup_guard) {
          out.push_back(newton_solve(rec.final_state(), m, op, s.newton));
        }
      } catch (const Error&) {
      }
    }
  }

  std::vector<Equilibrium> unique;
  for (auto& list : found) {
    for (auto& e : list) {
      if (match_equilibrium(e.u_star, unique, s.dedup_factor) < 0) unique.push_back(std::move(e));
    }
  }

  std::vector<char> keep(unique.size(), 0);
  const auto nu = static_cast<std::int64_t>(unique.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < nu; ++k) {
    try {
      keep[static_cast<std::size_t>(k)] = stationary(unique[static_cast<std::size_t>(k)], m, op, s);
    } catch (const std::exception&) {
    }
  }
  std::vector<Equilibrium> census;
  for (std::size_t k = 0; k < unique.size(); ++k) {
    if (keep[k]) census.push_back(std::move(unique[k]));
  }

  // Order by energy (rounded so mirror pairs tie), then by mean value.
  auto key = [](const Equilibrium& e) {
    double mean = 0.0;
    const Grid& gr = e.u_star.grid();
    for (std::size_t i = 0; i < e.u_star.size(); ++i) mean += gr.cell_weight(i) * e.u_star[i];
    return std::pair{std::llround(e.energy * 1e8), -mean};
  };
  std::stable_sort(census.begin(), census.end(),
                   [&](const Equilibrium& a, const Equilibrium& b) { return key(a) < key(b); });
  return census;
}

HomotopyScan homotopy_bound_scan(const NonlinearityModel& m, const TridiagOperator& op,
                                 std::span<const double> lambdas, std::span<const Field> probes,
                                 const HomotopyOptions& opt) {
  const Grid& g = op.grid();
  struct Task {
    std::size_t point;
    Field u0;
  };
  std::vector<NonlinearityModel> models;
  std::vector<Task> tasks;
  HomotopyScan scan;
  for (std::size_t p = 0; p < lambdas.size(); ++p) {
    const double lam = lambdas[p];
    if (!(lam >= 0.0 && lam <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
    models.push_back(m.homotopy_to_linear(lam));
    HomotopyPoint pt;
    pt.lambda = lam;
    for (const Field& f : probes) tasks.push_back({p, f});
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = -models.back().gamma(g.node(i));
    const auto dirs = unstable_directions(op.with_potential(v));
    pt.unstable_directions = dirs.size();
    for (const Field& d : dirs) {
      tasks.push_back({p, scaled(d, opt.eps)});
      tasks.push_back({p, scaled(d, -opt.eps)});
    }
    scan.points.push_back(pt);
  }

  struct Outcome {
    double sup_h1 = 0.0;
    bool blowup = false;
    bool monotone = true;
    double ratio = 0.0;
  };
  std::vector<Outcome> outcomes(tasks.size());
  std::vector<std::string> failures(tasks.size());
  Monitors mon;
  mon.r_cap = opt.r_cap;
  const auto n = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k) {
    const Task& t = tasks[static_cast<std::size_t>(k)];
    Outcome& o = outcomes[static_cast<std::size_t>(k)];
    try {
      const auto& mk = models[t.point];
      const TrajectoryRecord rec = evolve(t.u0, mk, op, opt.T, stable_step(mk, g, opt.dt), mon);
      o.blowup = rec.status == RunStatus::blowup_guard;
      o.sup_h1 = rec.max_h1;
      for (std::size_t i = 1; i < rec.l2.size(); ++i) {
        if (rec.l2[i] > rec.l2[i - 1]) o.monotone = false;
      }
      o.ratio = rec.l2.front() > 0.0 ? rec.l2.back() / rec.l2.front() : 0.0;
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(k)] = e.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw Error("homotopy scan: " + f);
  }

  for (std::size_t k = 0; k < tasks.size(); ++k) {
    HomotopyPoint& pt = scan.points[tasks[k].point];
    const Outcome& o = outcomes[k];
    ++pt.probes;
    if (o.blowup) {
      ++pt.blowups;
      ++scan.violations;
      continue;
    }
    pt.sup_h1 = std::max(pt.sup_h1, o.sup_h1);
    pt.monotone_decay = pt.monotone_decay && o.monotone;
    pt.decay_ratio = std::max(pt.decay_ratio, o.ratio);
  }
  for (std::size_t p = 0; p < scan.points.size(); ++p) {
    scan.R_observed = std::max(scan.R_observed, scan.points[p].sup_h1);
    if (p > 0) {
      const double a = scan.points[p - 1].sup_h1;
      const double b = scan.points[p].sup_h1;
      if (a > 0.0 && b > 0.0) {
        scan.max_adjacent_ratio = std::max(scan.max_adjacent_ratio, std::max(a / b, b / a));
      }
    }
  }
  return scan;
}

}  // namespace hetflow
