// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hetflow/connect.hpp"
#include "hetflow/equilibria.hpp"
#include "hetflow/errors.hpp"
#include "hetflow/semiflow.hpp"
#include "hetflow/spectrum.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace hetflow;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double time_limit, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0 && secs > time_limit) {
    v.pass = false;
    v.detail += " [over time limit " + std::to_string(time_limit) + " s]";
  }
  if (!v.pass) ++failures;
  std::printf("[%s] %2d %-28s %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// -Delta_h + 1 - g exp(-x^2): the linearization at 0 of the switch model.
TridiagOperator linearization_at_zero(const Grid& g, double depth) {
  return assemble_schrodinger(g, Field::sample(g, [&](double x) { return 1.0 - depth * std::exp(-x * x); }));
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

Verdict inertia_vs_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 60);
  std::uniform_real_distribution<double> entry(-10.0, 10.0);
  std::size_t mismatches = 0, checks = 0;
  for (int m = 0; m < 200; ++m) {
    const std::size_t n = size(rng);
    std::vector<double> diag(n), off(n - 1);
    for (auto& d : diag) d = entry(rng);
    // Some matrices get zero couplings, the reducible case.
    for (auto& o : off) o = (m % 10 == 0 && entry(rng) > 5.0) ? 0.0 : entry(rng);
    const SymTridiag t(diag, off);
    const auto eig = oracle::jacobi_eigen(oracle::dense_tridiag(diag, off));
    std::uniform_real_distribution<double> shift(t.gershgorin_lower() - 1.0, t.gershgorin_upper() + 1.0);
    for (int s = 0; s < 100; ++s) {
      const double sigma = shift(rng);
      ++checks;
      if (inertia_below(t, sigma).count != oracle::count_below(eig, sigma)) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%zu mismatches in %zu counts", mismatches, checks)};
}

Verdict laplacian_spectrum() {
  const std::size_t n = 500;
  const Grid g = make_grid(1.0, n);
  const TridiagOperator a = assemble_laplacian(g);
  const double tol = 1e-10 * a.norm();
  const auto eig = eigenvalues_below(a, a.matrix().gershgorin_upper() + 1.0, 1e-3 * tol);
  if (eig.size() != n) return {false, fmt("got %zu eigenvalues", eig.size())};
  const double h = g.spacing();
  double worst = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double s = std::sin(j * std::numbers::pi / (2.0 * (n + 1)));
    worst = std::max(worst, std::abs(eig[j - 1] - 4.0 / (h * h) * s * s));
  }
  return {worst <= tol, fmt("max error %.3e, tol %.3e", worst, tol)};
}

Verdict morse_pipeline() {
  const double nu_tilde = 1.0;
  std::vector<std::size_t> counts;
  bool monotone = true, oracle_ok = true, doubling_ok = true;
  std::size_t certified = 0;
  const Grid coarse = make_grid(20.0, 999), fine = make_grid(20.0, 1999), small = make_grid(20.0, 300);
  std::string seq;
  for (int depth = 0; depth <= 10; ++depth) {
    const auto rc = nonresonance_report(linearization_at_zero(coarse, depth), nu_tilde, default_resonance_tol(coarse));
    const auto rf = nonresonance_report(linearization_at_zero(fine, depth), nu_tilde, default_resonance_tol(fine));
    if (!counts.empty() && rc.count_negative < counts.back()) monotone = false;
    counts.push_back(rc.count_negative);
    seq += std::to_string(rc.count_negative);
    if (rc.certified() && rf.certified()) {
      ++certified;
      if (rc.count_negative != rf.count_negative) doubling_ok = false;
    }
    const TridiagOperator s = linearization_at_zero(small, depth);
    const auto eig = oracle::jacobi_eigen(oracle::dense_tridiag(s.matrix().diag, s.matrix().off));
    if (count_negative(s) != oracle::count_below(eig, 0.0)) oracle_ok = false;
  }
  return {monotone && oracle_ok && doubling_ok,
          fmt("m'(g=0..10) = %s, oracle %s, doubling stable on %zu certified depths", seq.c_str(),
              oracle_ok ? "ok" : "MISMATCH", certified) +
              (doubling_ok ? "" : " (doubling changed a count)")};
}

Verdict lyapunov_dissipation() {
  const Grid g = make_grid(20.0, 499);
  const TridiagOperator a = assemble_laplacian(g);
  const NonlinearityModel m = scenario::switch_well(3.0);
  std::vector<double> excess(50);
  Monitors mon;
  mon.series_stride = 1000;
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < 50; ++j) {
    const TrajectoryRecord rec = evolve(random_bump_field(g, 100 + j, 3.0), m, a, 20.0, 1e-3, mon);
    // ratio of the worst increase to the allowed 1e-8 (1 + |V(u0)|)
    excess[j] = rec.max_energy_increase / rec.energy_tol;
  }
  const double worst = *std::max_element(excess.begin(), excess.end());
  return {worst <= 1.0, fmt("worst increase / tolerance = %.3e over 50 runs", worst)};
}

Verdict tail_bound() {
  const double L = 20.0;
  const Grid g = make_grid(L, 499);
  const TridiagOperator a = assemble_laplacian(g);
  const NonlinearityModel m = scenario::switch_well(3.0);
  const auto cert = check_dissipativity(m, lattice(-L, L, 401), lattice(-100, 100, 2001));
  if (!cert.certified()) return {false, "model not certified dissipative"};
  const std::vector<double> ks{L / 4, L / 2};
  std::vector<double> worst(20, -INFINITY);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < 20; ++j) {
    Monitors mon;
    mon.k_list = ks;
    const TrajectoryRecord rec = evolve(random_bump_field(g, 500 + j, 3.0), m, a, 20.0, 0.01, mon);
    for (double mg : tail_bound_check(rec, m, cert, rec.max_h1, ks)) worst[j] = std::max(worst[j], mg);
  }
  const double w = *std::max_element(worst.begin(), worst.end());
  return {w <= 0.0, fmt("largest margin %.3e over 20 runs, k in {%g, %g}", w, ks[0], ks[1])};
}

Verdict continuous_dependence() {
  const Grid g = make_grid(20.0, 399);
  const TridiagOperator a = assemble_laplacian(g);
  const NonlinearityModel limit = scenario::switch_well(0.5);
  const Field u0 = random_bump_field(g, 7, 1.0);
  std::vector<ConvergenceCase> family;
  const std::vector<int> js{1, 2, 4, 8, 16, 32, 64};
  for (int j : js) family.push_back({limit.with_forcing(Profile{0.0, {Well::gaussian(1.0 / j, 1.0)}}), u0});
  const ConvergenceResult r = convergence_experiment(limit, u0, family, a, 0.5, 5.0, 0.01);
  bool monotone = true;
  for (std::size_t i = 1; i < r.sup_error.size(); ++i) {
    if (r.sup_error[i] > 1.1 * r.sup_error[i - 1]) monotone = false;
  }
  const double e1 = r.sup_error.front(), e64 = r.sup_error.back();
  return {monotone && e64 < e1 / 10.0,
          fmt("e_1 = %.3e, e_64 = %.3e, ratio %.4f, %s", e1, e64, e64 / e1, monotone ? "monotone" : "NOT monotone")};
}

Verdict admissibility() {
  const double L = 20.0;
  const Grid g = make_grid(L, 399);
  const TridiagOperator a = assemble_laplacian(g);
  const NonlinearityModel m = scenario::switch_well(0.5);
  const auto cert = check_dissipativity(m, lattice(-L, L, 401), lattice(-100, 100, 2001));
  std::vector<Field> u0s;
  std::vector<double> ts;
  for (int j = 1; j <= 40; ++j) {
    u0s.push_back(random_bump_field(g, 900 + j, 1.0));
    ts.push_back(j);
  }
  AdmissibilityOptions opt;
  opt.k = L / 2;
  opt.tau = 1.0;
  opt.dt = 0.01;
  opt.window = 10;
  const AdmissibilityReport r = admissibility_experiment(u0s, ts, m, a, cert, opt);
  return {cert.certified() && r.all_within_bound && r.durations_diverge && r.excluded == 0 && r.diameter < 1e-3,
          fmt("tails within bound: %s, diameter of last 10 = %.3e, R = %.3f", r.all_within_bound ? "yes" : "no",
              r.diameter, r.R)};
}

Verdict heteroclinic_scenario() {
  const Grid g = make_grid(20.0, 999);
  const TridiagOperator a = assemble_laplacian(g);
  const NonlinearityModel m = scenario::switch_well(3.0);
  auto census = find_equilibria(m, a);
  std::size_t nontrivial = 0;
  for (const auto& e : census) {
    if (!e.trivial && e.h1_norm > 1e-3 && e.energy < 0.0) ++nontrivial;
  }
  const ConnectionSearch s = heteroclinic_search(m, a, census);
  std::size_t valid = 0;
  double drop = 0.0;
  for (const auto& c : s.records) {
    if (c.valid() && c.source.trivial) {
      ++valid;
      drop = std::max(drop, c.energy_drop);
    }
  }
  return {s.m == 0 && s.m_prime == 1 && nontrivial >= 1 && valid >= 1,
          fmt("m = %zu, m' = %zu, %zu nontrivial equilibria, %zu valid connections, energy drop %.6f", s.m,
              s.m_prime, nontrivial, valid, drop)};
}

Verdict null_scenario() {
  const Grid g = make_grid(20.0, 399);
  const TridiagOperator a = assemble_laplacian(g);
  const NonlinearityModel m = scenario::switch_well(0.0);
  SeedStrategy s;
  s.random_seeds = 64;
  auto census = find_equilibria(m, a, s);
  const bool only_trivial = census.size() == 1 && census.front().trivial;
  bool precondition = false;
  std::string why;
  try {
    heteroclinic_search(m, a, census);
  } catch (const PreconditionError& e) {
    precondition = true;
    why = e.what();
  }
  return {only_trivial && precondition,
          fmt("%zu equilibria from 64 random seeds; search: %s", census.size(),
              precondition ? why.c_str() : "did not raise")};
}

Verdict integrator_consistency() {
  const NonlinearityModel m = make_linear_model(Profile::uniform(-1.0));
  // Time: against the semi-discrete solution exp(-(lambda_h + 1) t) phi_h.
  const Grid g = make_grid(std::numbers::pi / 2, 63);
  const TridiagOperator a = assemble_laplacian(g);
  const double lam_h = eigenvalues_below(a, 2.0, 1e-14).front();
  const Field phi = Field::sample(g, [](double x) { return std::cos(x); });
  const double T = 1.0;
  std::vector<double> dts, terr;
  for (int p = 4; p <= 10; ++p) {
    const double dt = std::ldexp(1.0, -p);
    const TrajectoryRecord rec = evolve(phi, m, a, T, dt);
    dts.push_back(dt);
    terr.push_back(l2_distance(rec.final_state(), std::exp(-(lam_h + 1.0) * T) * phi));
  }
  const double time_slope = fit_slope(dts, terr);

  // Space: against exp(-2t) cos(x) on [-pi/2, pi/2] with dt = h^2/100.
  std::vector<double> hs, serr;
  for (std::size_t cells : {8, 16, 32, 64}) {
    const Grid gs = make_grid(std::numbers::pi / 2, cells - 1);
    const TridiagOperator as = assemble_laplacian(gs);
    const Field u0 = Field::sample(gs, [](double x) { return std::cos(x); });
    const double h = gs.spacing();
    const TrajectoryRecord rec = evolve(u0, m, as, T, h * h / 100.0);
    hs.push_back(h);
    serr.push_back(l2_distance(rec.final_state(), std::exp(-2.0 * T) * u0));
  }
  const double space_slope = fit_slope(hs, serr);
  return {std::abs(time_slope - 1.0) <= 0.2 && std::abs(space_slope - 2.0) <= 0.2,
          fmt("time slope %.3f, space slope %.3f", time_slope, space_slope)};
}

Verdict homotopy_scan() {
  const Grid g = make_grid(20.0, 999);
  const TridiagOperator a = assemble_laplacian(g);
  const NonlinearityModel m = scenario::switch_well(3.0);
  std::vector<double> lambdas;
  for (int i = 0; i <= 10; ++i) lambdas.push_back(i / 10.0);
  std::vector<Field> probes;
  for (std::uint64_t s = 1; s <= 4; ++s) probes.push_back(random_bump_field(g, 300 + s, 2.0));
  const HomotopyScan scan = homotopy_bound_scan(m, a, lambdas, probes);
  std::size_t blowups = 0;
  for (const auto& p : scan.points) blowups += p.blowups;
  const bool decay = scan.points.front().monotone_decay;
  return {std::isfinite(scan.R_observed) && blowups == 0 && decay,
          fmt("R_observed = %.4f, blowups %zu, lambda = 0 decay %s", scan.R_observed, blowups,
              decay ? "monotone" : "NOT monotone")};
}

}  // namespace

int main() {
  criterion(1, "inertia-vs-dense-oracle", 30.0, inertia_vs_oracle);
  criterion(2, "laplacian-closed-form", 5.0, laplacian_spectrum);
  criterion(3, "morse-index-pipeline", 0.0, morse_pipeline);
  criterion(4, "lyapunov-dissipation", 0.0, lyapunov_dissipation);
  criterion(5, "tail-bound", 0.0, tail_bound);
  criterion(6, "continuous-dependence", 0.0, continuous_dependence);
  criterion(7, "admissibility-proxy", 0.0, admissibility);
  criterion(8, "heteroclinic-scenario", 120.0, heteroclinic_scenario);
  criterion(9, "null-scenario", 0.0, null_scenario);
  criterion(10, "integrator-consistency", 0.0, integrator_consistency);
  criterion(11, "homotopy-scan", 0.0, homotopy_scan);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
