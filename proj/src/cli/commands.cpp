#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "hetflow/cli.hpp"
#include "hetflow/semiflow.hpp"
#include "hetflow/spectrum.hpp"

#ifndef HETFLOW_VERSION
#define HETFLOW_VERSION "unknown"
#endif

namespace hetflow::cli {

const char* version() noexcept { return HETFLOW_VERSION; }

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Context {
  const ExperimentConfig& cfg;
  std::string hash;
  Grid grid;
  NonlinearityModel model;
  TridiagOperator op;
  fs::path out_dir;
  std::vector<std::string> summary;

  std::string stamp() const {
    return "# config_hash=" + hash + " version=" + std::string(version());
  }
  void say(const std::string& line) { summary.push_back(line); }
};

class Csv {
 public:
  Csv(const Context& ctx, const std::string& name, const std::vector<std::string>& header)
      : out_(ctx.out_dir / name) {
    if (!out_) throw Error("cannot write " + (ctx.out_dir / name).string());
    out_ << ctx.stamp() << '\n';
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::vector<double> potential_of(const Grid& g, const std::function<double(double)>& slope) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -slope(g.node(i));
  return v;
}

TridiagOperator at_zero(const Context& c) {
  return c.op.with_potential(potential_of(c.grid, [&](double x) { return c.model.gamma(x); }));
}
TridiagOperator at_infinity(const Context& c) {
  return c.op.with_potential(potential_of(c.grid, [&](double x) { return c.model.alpha(x); }));
}

double resonance_tol(const Context& c) {
  return c.cfg.resonance_tol > 0.0 ? c.cfg.resonance_tol : default_resonance_tol(c.grid);
}

std::vector<double> x_lattice(const Context& c) {
  const double L = c.cfg.half_width;
  return c.grid.mode() == DimMode::line ? lattice(-L, L, c.cfg.x_samples)
                                        : lattice(0.0, L, c.cfg.x_samples);
}

DissipativityCertificate certify_dissipativity(const Context& c) {
  const auto xs = x_lattice(c);
  const auto us = lattice(-c.cfg.u_max, c.cfg.u_max, c.cfg.u_samples);
  return check_dissipativity(c.model, xs, us);
}

Field initial_field(const Context& c) {
  const InitialSpec& s = c.cfg.initial;
  switch (s.kind) {
    case InitialKind::zero:
      return Field(c.grid);
    case InitialKind::gaussian:
      return Field::sample(c.grid, [&](double x) {
        const double z = (x - s.center) / s.width;
        return s.amplitude * std::exp(-z * z);
      });
    case InitialKind::random:
      return random_bump_field(c.grid, c.cfg.seed, s.amplitude);
    case InitialKind::eigenvector: {
      const TridiagOperator lin = at_zero(c);
      const auto eig = eigenvalues_below(lin, 0.0, 1e-13 * lin.norm());
      if (s.direction >= eig.size()) {
        throw PreconditionError("evolve.direction = " + std::to_string(s.direction) +
                                " but 0 has " + std::to_string(eig.size()) +
                                " unstable directions");
      }
      return s.amplitude * eigenvector(lin, eig[s.direction]);
    }
  }
  return Field(c.grid);
}

void write_trajectory(const Context& c, const std::string& name, const TrajectoryRecord& rec) {
  std::vector<std::string> header{"t", "l2", "h1", "V", "dV_proxy"};
  for (double k : rec.k_list) header.push_back("tail_k" + num(k));
  Csv csv(c, name, header);
  for (std::size_t s = 0; s < rec.times.size(); ++s) {
    std::vector<std::string> row{num(rec.times[s]), num(rec.l2[s]), num(rec.h1[s]),
                                 num(rec.energy[s]), num(rec.dv_proxy[s])};
    for (const auto& tail : rec.tails) row.push_back(num(tail[s]));
    csv.row(row);
  }
}

void write_census(const Context& c, const std::vector<Equilibrium>& census) {
  Csv csv(c, "equilibria.csv",
          {"id", "h1_norm", "energy", "morse_index", "residual", "trivial", "hyperbolic"});
  for (std::size_t i = 0; i < census.size(); ++i) {
    const auto& e = census[i];
    csv.row({std::to_string(i), num(e.h1_norm), num(e.energy), std::to_string(e.morse_index),
             num(e.residual), e.trivial ? "1" : "0", e.hyperbolic ? "1" : "0"});
  }
  std::vector<std::string> header{"x"};
  for (std::size_t i = 0; i < census.size(); ++i) header.push_back("u" + std::to_string(i));
  Csv states(c, "equilibria_states.csv", header);
  for (std::size_t j = 0; j < c.grid.size(); ++j) {
    std::vector<std::string> row{num(c.grid.node(j))};
    for (const auto& e : census) row.push_back(num(e.u_star[j]));
    states.row(row);
  }
}

int cmd_spectrum(Context& c) {
  const double tol = resonance_tol(c);
  const SpectralReport zero = nonresonance_report(at_zero(c), c.cfg.nu_tilde, tol);
  const SpectralReport inf = nonresonance_report(at_infinity(c), c.cfg.nu_tilde, tol);
  Csv csv(c, "spectrum.csv", {"operator", "index", "eigenvalue"});
  for (std::size_t i = 0; i < inf.eigenvalues_below_cutoff.size(); ++i) {
    csv.row({"infinity", std::to_string(i), num(inf.eigenvalues_below_cutoff[i])});
  }
  for (std::size_t i = 0; i < zero.eigenvalues_below_cutoff.size(); ++i) {
    csv.row({"zero", std::to_string(i), num(zero.eigenvalues_below_cutoff[i])});
  }
  const bool ok = zero.certified() && inf.certified();
  c.say("cutoff " + num(zero.cutoff) + " resonance_tol " + num(tol));
  c.say("kernel_gap infinity " + num(inf.kernel_gap) + " zero " + num(zero.kernel_gap));
  c.say("m=" + std::to_string(inf.count_negative) + " m'=" + std::to_string(zero.count_negative) +
        (ok ? " certified" : " uncertified"));
  return ok ? exit_ok : exit_falsified;
}

int cmd_certify(Context& c) {
  const auto xs = x_lattice(c);
  const auto us = lattice(-c.cfg.u_max, c.cfg.u_max, c.cfg.u_samples);
  const double s0 = c.model.switch_scale();
  const GrowthCheck growth = check_growth(c.model, xs, us);
  const DissipativityCertificate diss = check_dissipativity(c.model, xs, us);
  const SlopeDeviation slopes =
      check_asymptotic_slopes(c.model, xs, c.cfg.u_large_factor * s0, 1e-3 * s0);
  const double gap = c.model.slope_gap_bound();
  const double q = c.cfg.u_large_factor;
  const double inf_tol = 2.0 * gap / (1.0 + q * q) + 1e-14;
  const double tol = resonance_tol(c);
  const SpectralReport rz = nonresonance_report(at_zero(c), c.cfg.nu_tilde, tol);
  const SpectralReport ri = nonresonance_report(at_infinity(c), c.cfg.nu_tilde, tol);

  struct Row {
    std::string hypothesis, quantity;
    double value, threshold;
    bool ok;
  };
  const std::vector<Row> rows{
      {"growth", "max|dF/du|", growth.max_abs_derivative, growth.bound, growth.certified()},
      {"dissipativity", "max_violation", diss.max_violation, 0.0, diss.certified()},
      {"slope_at_infinity", "dev_inf", slopes.dev_inf, inf_tol, slopes.dev_inf <= inf_tol},
      {"slope_at_zero", "dev_zero", slopes.dev_zero, 0.0, slopes.dev_zero <= 1e-14},
      {"nonresonance_infinity", "kernel_gap", ri.kernel_gap, tol, ri.certified()},
      {"nonresonance_zero", "kernel_gap", rz.kernel_gap, tol, rz.certified()},
  };
  Csv csv(c, "certification.csv", {"hypothesis", "quantity", "value", "threshold", "verdict"});
  bool all = true;
  for (const Row& r : rows) {
    csv.row({r.hypothesis, r.quantity, num(r.value), num(r.threshold), r.ok ? "pass" : "fail"});
    char line[160];
    std::snprintf(line, sizeof line, "%-22s %-14s %14.6g %14.6g  %s", r.hypothesis.c_str(),
                  r.quantity.c_str(), r.value, r.threshold, r.ok ? "pass" : "FAIL");
    c.say(line);
    all = all && r.ok;
  }
  c.say("m=" + std::to_string(ri.count_negative) + " m'=" + std::to_string(rz.count_negative));
  if (!diss.certified()) {
    c.say("dissipativity violated: F(x,u)u + nu u^2 - b|u|^q - c reaches " +
          num(diss.max_violation) + " with nu = " + num(diss.nu));
  }
  return all ? exit_ok : exit_falsified;
}

int cmd_evolve(Context& c) {
  Monitors mon;
  mon.k_list = c.cfg.k_list;
  mon.r_cap = c.cfg.r_cap;
  mon.series_stride = c.cfg.series_stride;
  mon.energy_tol_factor = c.cfg.energy_tol_factor;
  const Field u0 = initial_field(c);
  const TrajectoryRecord rec = evolve(u0, c.model, c.op, c.cfg.T, c.cfg.dt, mon);
  write_trajectory(c, "trajectory.csv", rec);
  {
    Csv csv(c, "final_state.csv", {"x", "u0", "u"});
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      csv.row({num(c.grid.node(i)), num(u0[i]), num(rec.final_state()[i])});
    }
  }
  const double rise = dissipation_check(rec);
  const bool energy_ok = rise <= rec.energy_tol;
  c.say("status " + std::string(to_string(rec.status)) + " steps " + std::to_string(rec.steps) +
        " t_end " + num(rec.final_time()));
  c.say("max energy increase " + num(rise) + " tol " + num(rec.energy_tol) +
        (energy_ok ? " ok" : " VIOLATED"));
  bool tails_ok = true;
  const DissipativityCertificate cert = certify_dissipativity(c);
  if (cert.certified() && !rec.k_list.empty()) {
    const auto margins = tail_bound_check(rec, c.model, cert, rec.max_h1, rec.k_list);
    for (std::size_t i = 0; i < margins.size(); ++i) {
      tails_ok = tails_ok && margins[i] <= 0.0;
      c.say("tail margin k=" + num(rec.k_list[i]) + " " + num(margins[i]) +
            (margins[i] <= 0.0 ? " ok" : " VIOLATED"));
    }
  } else {
    c.say("tail bound not checked (model not certified dissipative)");
  }
  return energy_ok && tails_ok ? exit_ok : exit_falsified;
}

int cmd_equilibria(Context& c) {
  const auto census = find_equilibria(c.model, c.op, c.cfg.seeds);
  write_census(c, census);
  std::size_t nontrivial = 0;
  for (const auto& e : census) nontrivial += e.trivial ? 0 : 1;
  c.say("equilibria " + std::to_string(census.size()) + " nontrivial " +
        std::to_string(nontrivial));
  for (std::size_t i = 0; i < census.size(); ++i) {
    const auto& e = census[i];
    c.say("  #" + std::to_string(i) + " h1 " + num(e.h1_norm) + " V " + num(e.energy) +
          " morse " + std::to_string(e.morse_index) + (e.trivial ? " trivial" : ""));
  }
  return exit_ok;
}

int cmd_homotopy(Context& c) {
  std::vector<double> lambdas(c.cfg.lambda_points);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    lambdas[i] = static_cast<double>(i) / static_cast<double>(lambdas.size() - 1);
  }
  std::vector<Field> probes;
  for (std::size_t i = 0; i < c.cfg.homotopy_probes; ++i) {
    probes.push_back(random_bump_field(c.grid, c.cfg.seed + 1000 + i, c.cfg.probe_amplitude));
  }
  const HomotopyScan scan = homotopy_bound_scan(c.model, c.op, lambdas, probes, c.cfg.homotopy);
  Csv csv(c, "homotopy.csv",
          {"lambda", "sup_h1", "probes", "unstable_directions", "blowups", "monotone_decay",
           "decay_ratio"});
  for (const auto& p : scan.points) {
    csv.row({num(p.lambda), num(p.sup_h1), std::to_string(p.probes),
             std::to_string(p.unstable_directions), std::to_string(p.blowups),
             p.monotone_decay ? "1" : "0", num(p.decay_ratio)});
  }
  const bool decay = scan.points.front().monotone_decay;
  c.say("R_observed " + num(scan.R_observed) + " max adjacent ratio " +
        num(scan.max_adjacent_ratio));
  c.say("blowup violations " + std::to_string(scan.violations));
  c.say(std::string("lambda=0 probes decay monotonically: ") + (decay ? "yes" : "NO"));
  return scan.violations == 0 && decay ? exit_ok : exit_falsified;
}

int cmd_heteroclinic(Context& c) {
  auto census = find_equilibria(c.model, c.op, c.cfg.seeds);
  const ConnectionSearch search = heteroclinic_search(c.model, c.op, census, c.cfg.connect);
  write_census(c, census);
  Csv csv(c, "connections.csv",
          {"id", "source", "target", "direction", "sign", "eigenvalue", "energy_drop",
           "closeness", "steps", "t_end"});
  std::size_t source_id = census.size();
  for (std::size_t i = 0; i < census.size(); ++i) {
    if (census[i].trivial) source_id = i;
  }
  for (std::size_t i = 0; i < search.records.size(); ++i) {
    const auto& r = search.records[i];
    csv.row({std::to_string(i), std::to_string(source_id), std::to_string(r.target_id),
             std::to_string(r.direction), std::to_string(r.sign), num(r.eigenvalue),
             num(r.energy_drop), num(r.closeness), std::to_string(r.trajectory.steps),
             num(r.trajectory.final_time())});
    if (c.cfg.write_trajectories) {
      write_trajectory(c, "connection_" + std::to_string(i) + ".csv", r.trajectory);
    }
  }
  c.say("m=" + std::to_string(search.m) + " m'=" + std::to_string(search.m_prime));
  for (const auto& a : search.attempts) {
    c.say("  direction " + std::to_string(a.direction) + (a.sign > 0 ? " +" : " -") + ": " +
          a.outcome +
          (a.target_id ? " (equilibrium #" + std::to_string(*a.target_id) + ")" : ""));
  }
  c.say("connections " + std::to_string(search.records.size()) +
        (search.falsified() ? " FALSIFIED: no connection to a nontrivial equilibrium" : ""));
  return search.falsified() ? exit_falsified : exit_ok;
}

int cmd_admissibility(Context& c) {
  const std::size_t n = c.cfg.adm_count;
  std::vector<Field> u0s;
  std::vector<double> ts;
  for (std::size_t j = 1; j <= n; ++j) {
    u0s.push_back(random_bump_field(c.grid, c.cfg.seed + j, c.cfg.adm_amplitude));
    ts.push_back(static_cast<double>(j));
  }
  AdmissibilityOptions opt;
  opt.R = c.cfg.adm_R;
  opt.k = c.cfg.adm_k;
  opt.tau = c.cfg.adm_tau;
  opt.dt = c.cfg.dt;
  opt.window = c.cfg.adm_window;
  const auto rep =
      admissibility_experiment(u0s, ts, c.model, c.op, certify_dissipativity(c), opt);
  Csv csv(c, "admissibility.csv",
          {"j", "t", "tail", "bound", "max_h1", "within_bound", "excluded"});
  for (std::size_t j = 0; j < rep.entries.size(); ++j) {
    const auto& e = rep.entries[j];
    csv.row({std::to_string(j + 1), num(e.t), num(e.tail), num(e.bound), num(e.max_h1),
             e.within_bound ? "1" : "0", e.excluded ? "1" : "0"});
  }
  c.say("R " + num(rep.R) + " k " + num(opt.k) + " alpha_k " + num(rep.alpha_k));
  c.say("excluded " + std::to_string(rep.excluded) + " all tails within bound: " +
        (rep.all_within_bound ? "yes" : "NO"));
  c.say("endpoint diameter (last " + std::to_string(opt.window) + ") " + num(rep.diameter) +
        " core " + num(rep.core_diameter));
  c.say(std::string("durations diverge: ") + (rep.durations_diverge ? "yes" : "no"));
  return rep.all_within_bound ? exit_ok : exit_falsified;
}

int cmd_convergence(Context& c) {
  const Field u0 = initial_field(c);
  std::vector<ConvergenceCase> family;
  for (std::size_t j : c.cfg.conv_members) {
    Well w = c.cfg.conv_perturbation;
    w.amplitude /= static_cast<double>(j);
    family.push_back({c.model.with_forcing(Profile{0.0, {w}}), u0});
  }
  const auto res = convergence_experiment(c.model, u0, family, c.op, c.cfg.conv_delta,
                                          c.cfg.conv_T, c.cfg.dt);
  Csv csv(c, "convergence.csv", {"j", "sup_error", "initial_l2", "initial_h1"});
  for (std::size_t i = 0; i < family.size(); ++i) {
    csv.row({std::to_string(c.cfg.conv_members[i]), num(res.sup_error[i]),
             num(res.initial_l2[i]), num(res.initial_h1[i])});
  }
  const double first = res.sup_error.front();
  const double last = res.sup_error.back();
  c.say("growth constant " + num(res.growth_constant));
  c.say("sup error first " + num(first) + " last " + num(last) + " ratio " +
        num(first > 0.0 ? last / first : 0.0));
  return family.size() < 2 || last < first ? exit_ok : exit_falsified;
}

const std::map<std::string, int (*)(Context&)>& table() {
  static const std::map<std::string, int (*)(Context&)> t{
      {"spectrum", cmd_spectrum},         {"evolve", cmd_evolve},
      {"equilibria", cmd_equilibria},     {"homotopy", cmd_homotopy},
      {"heteroclinic", cmd_heteroclinic}, {"admissibility", cmd_admissibility},
      {"convergence", cmd_convergence},   {"certify", cmd_certify},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"spectrum",     "evolve",        "equilibria",
                                              "homotopy",     "heteroclinic",  "admissibility",
                                              "convergence",  "certify"};
  return names;
}

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const auto it = table().find(inv.command);
  if (it == table().end()) {
    err << "unknown command '" << inv.command << "'\n";
    return exit_error;
  }
  try {
    const ExperimentConfig cfg = load_config(inv.config_path, inv.overrides);
    fs::create_directories(inv.out_dir);
    const Grid grid = build_grid(cfg);
    Context ctx{cfg, config_hash(cfg), grid, build_model(cfg), assemble_laplacian(grid),
                inv.out_dir, {}};
    const int code = it->second(ctx);
    std::ofstream summary(ctx.out_dir / "summary.txt");
    summary << ctx.stamp() << '\n' << "command " << inv.command << '\n';
    for (const auto& line : ctx.summary) {
      summary << line << '\n';
      out << line << '\n';
    }
    summary << "exit " << code << '\n';
    return code;
  } catch (const ConfigError& e) {
    err << "invalid configuration (" << e.problems().size() << " problems):\n";
    for (const auto& p : e.problems()) err << "  " << p << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return exit_error;
}

}  // namespace hetflow::cli
