#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "hetflow/cli.hpp"

namespace hetflow::cli {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& p : v) s += "\n  " + p;
  return s;
}

// Typed access to a parsed table that remembers which keys were read, so the
// leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const toml::table& root, std::vector<std::string>& problems)
      : root_(root), problems_(problems) {}

  void problem(const std::string& path, const std::string& msg) {
    problems_.push_back(path + ": " + msg);
  }

  toml::node_view<const toml::node> at(const std::string& path) {
    used_.insert(path);
    return root_.at_path(path);
  }

  double real(const std::string& path, double fallback) {
    auto n = at(path);
    if (!n) return fallback;
    if (auto v = n.value<double>(); v && (n.is_floating_point() || n.is_integer())) {
      if (!std::isfinite(*v)) problem(path, "must be finite");
      return *v;
    }
    problem(path, "expected a number");
    return fallback;
  }

  double positive(const std::string& path, double fallback) {
    const double v = real(path, fallback);
    if (!(v > 0.0)) problem(path, "must be positive");
    return v;
  }

  double nonnegative(const std::string& path, double fallback) {
    const double v = real(path, fallback);
    if (!(v >= 0.0)) problem(path, "must be nonnegative");
    return v;
  }

  std::int64_t integer(const std::string& path, std::int64_t fallback, std::int64_t lo) {
    auto n = at(path);
    if (!n) return fallback;
    if (!n.is_integer()) {
      problem(path, "expected an integer");
      return fallback;
    }
    const auto v = *n.value<std::int64_t>();
    if (v < lo) {
      problem(path, "must be at least " + std::to_string(lo));
      return fallback;
    }
    return v;
  }

  bool boolean(const std::string& path, bool fallback) {
    auto n = at(path);
    if (!n) return fallback;
    if (!n.is_boolean()) {
      problem(path, "expected true or false");
      return fallback;
    }
    return *n.value<bool>();
  }

  std::string text(const std::string& path, const std::string& fallback) {
    auto n = at(path);
    if (!n) return fallback;
    if (!n.is_string()) {
      problem(path, "expected a string");
      return fallback;
    }
    return *n.value<std::string>();
  }

  std::vector<double> reals(const std::string& path, std::vector<double> fallback) {
    auto n = at(path);
    if (!n) return fallback;
    const toml::array* arr = n.as_array();
    if (!arr) {
      problem(path, "expected an array of numbers");
      return fallback;
    }
    std::vector<double> out;
    for (const auto& e : *arr) {
      auto v = e.value<double>();
      if (!v || !(e.is_integer() || e.is_floating_point())) {
        problem(path, "expected an array of numbers");
        return fallback;
      }
      out.push_back(*v);
    }
    return out;
  }

  Well well(const std::string& path) {
    Well w;
    auto n = at(path);
    if (!n) return w;
    if (!n.is_table()) {
      problem(path, "expected a table {kind, amplitude, width}");
      return w;
    }
    const std::string kind = text(path + ".kind", "zero");
    if (kind == "zero") {
      w.kind = WellKind::zero;
    } else if (kind == "gaussian") {
      w.kind = WellKind::gaussian;
    } else if (kind == "square") {
      w.kind = WellKind::square;
    } else {
      problem(path + ".kind", "must be one of zero, gaussian, square");
    }
    w.amplitude = real(path + ".amplitude", 0.0);
    w.width = positive(path + ".width", 1.0);
    return w;
  }

  // A number, or a table {constant, kind, amplitude, width}.
  Profile profile(const std::string& path) {
    auto n = at(path);
    if (!n) return {};
    if (n.is_integer() || n.is_floating_point()) return Profile::uniform(real(path, 0.0));
    if (!n.is_table()) {
      problem(path, "expected a number or a table {constant, kind, amplitude, width}");
      return {};
    }
    Profile p = Profile::uniform(real(path + ".constant", 0.0));
    if (n.as_table()->contains("kind")) {
      const Well w = well(path);
      if (w.kind != WellKind::zero) p.wells.push_back(w);
    }
    return p;
  }

  void report_unknown() { walk(root_, ""); }

 private:
  void walk(const toml::table& t, const std::string& prefix) {
    for (const auto& [k, v] : t) {
      const std::string path = prefix.empty() ? std::string(k.str()) : prefix + "." + std::string(k.str());
      if (const toml::table* sub = v.as_table()) {
        if (sub->empty() && !used_.count(path)) problems_.push_back(path + ": unknown key");
        walk(*sub, path);
      } else if (!used_.count(path)) {
        problems_.push_back(path + ": unknown key");
      }
    }
  }

  const toml::table& root_;
  std::vector<std::string>& problems_;
  std::set<std::string> used_;
};

void apply_override(toml::table& root, const std::string& spec, std::vector<std::string>& problems) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    problems.push_back("override '" + spec + "': expected key=value");
    return;
  }
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  const std::string key = trim(spec.substr(0, eq));
  const std::string value = trim(spec.substr(eq + 1));
  if (key.empty()) {
    problems.push_back("override '" + spec + "': empty key");
    return;
  }

  toml::table parsed;
  try {
    parsed = toml::parse("v = " + value);
  } catch (const toml::parse_error&) {
    parsed = toml::table{{"v", value}};
  }

  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  toml::table* t = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    toml::node* n = t->get(parts[i]);
    if (!n) {
      t->insert(parts[i], toml::table{});
      n = t->get(parts[i]);
    }
    t = n->as_table();
    if (!t) {
      problems.push_back("override '" + spec + "': " + parts[i] + " is not a table");
      return;
    }
  }
  t->insert_or_assign(parts.back(), *parsed.get("v"));
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error("invalid configuration:" + join(problems)), problems_(std::move(problems)) {}

ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides,
                              std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw ConfigError({msg.str()});
  }

  std::vector<std::string> problems;
  for (const auto& o : overrides) apply_override(root, o, problems);

  ExperimentConfig c;
  Reader r(root, problems);

  c.half_width = r.positive("grid.half_width", c.half_width);
  c.n_interior = static_cast<std::size_t>(r.integer("grid.n_interior", 999, 3));
  const std::string mode = r.text("grid.mode", "line");
  if (mode == "line") {
    c.mode = DimMode::line;
  } else if (mode == "radial") {
    c.mode = DimMode::radial;
  } else {
    r.problem("grid.mode", "must be line or radial");
  }
  c.dimension = static_cast<int>(r.integer("grid.dimension", 3, 2));
  if (c.dimension > 3) r.problem("grid.dimension", "must be 2 or 3");

  c.switch_scale = r.positive("model.switch_scale", 1.0);
  c.alpha.base_level = r.positive("model.alpha.base_level", 1.0);
  c.alpha.well = r.well("model.alpha.well");
  c.gamma.base_level = r.positive("model.gamma.base_level", 1.0);
  c.gamma.well = r.well("model.gamma.well");
  c.forcing = r.profile("model.forcing");

  const double base = std::min(c.alpha.base_level, c.gamma.base_level);
  c.dissipativity.nu = r.positive("model.dissipativity.nu", base);
  c.dissipativity.q = r.real("model.dissipativity.q", 2.0);
  if (!(c.dissipativity.q >= 2.0)) r.problem("model.dissipativity.q", "must be at least 2");
  if (auto b = r.at("model.dissipativity.b"); b && b.is_string()) {
    if (*b.value<std::string>() != "auto") r.problem("model.dissipativity.b", "expected \"auto\", a number or a table");
  } else if (b) {
    c.dissipativity.b_auto = false;
    c.dissipativity.b = r.profile("model.dissipativity.b");
  }
  c.dissipativity.c = r.profile("model.dissipativity.c");

  c.dt = r.positive("run.dt", c.dt);
  c.T = r.positive("run.T", c.T);
  c.r_cap = r.positive("run.R_cap", c.r_cap);
  c.k_list = r.reals("run.k_list", {c.half_width / 4.0, c.half_width / 2.0});
  for (double k : c.k_list) {
    if (!(k > 0.0)) r.problem("run.k_list", "entries must be positive");
  }
  c.seed = static_cast<std::uint64_t>(r.integer("run.seed", 1, 0));
  c.series_stride = static_cast<std::size_t>(r.integer("run.series_stride", 1, 1));
  c.energy_tol_factor = r.positive("run.energy_tol_factor", c.energy_tol_factor);

  c.nu_tilde = r.positive("spectrum.nu_tilde", base);
  c.resonance_tol = r.nonnegative("spectrum.resonance_tol", 0.0);

  const std::string init = r.text("evolve.initial", "random");
  if (init == "zero") {
    c.initial.kind = InitialKind::zero;
  } else if (init == "gaussian") {
    c.initial.kind = InitialKind::gaussian;
  } else if (init == "random") {
    c.initial.kind = InitialKind::random;
  } else if (init == "eigenvector") {
    c.initial.kind = InitialKind::eigenvector;
  } else {
    r.problem("evolve.initial", "must be one of zero, gaussian, random, eigenvector");
  }
  c.initial.amplitude = r.real("evolve.amplitude", 1.0);
  c.initial.width = r.positive("evolve.width", 1.0);
  c.initial.center = r.real("evolve.center", 0.0);
  c.initial.direction = static_cast<std::size_t>(r.integer("evolve.direction", 0, 0));

  SeedStrategy& s = c.seeds;
  s.random_seeds = static_cast<std::size_t>(r.integer("equilibria.random_seeds", 16, 0));
  s.eps = r.positive("equilibria.eps", s.eps);
  s.amplitude = r.positive("equilibria.amplitude", s.amplitude);
  s.preflow_time = r.nonnegative("equilibria.preflow_time", s.preflow_time);
  s.dedup_factor = r.positive("equilibria.dedup_factor", s.dedup_factor);
  s.verify_time = r.positive("equilibria.verify_time", s.verify_time);
  s.stationarity_tol = r.positive("equilibria.stationarity_tol", s.stationarity_tol);
  s.newton.tol = r.positive("equilibria.newton_tol", s.newton.tol);
  s.newton.max_iterations = static_cast<int>(r.integer("equilibria.max_iterations", 60, 1));
  s.newton.trivial_tol = r.positive("equilibria.trivial_tol", s.newton.trivial_tol);

  c.lambda_points = static_cast<std::size_t>(r.integer("homotopy.points", 11, 2));
  c.homotopy_probes = static_cast<std::size_t>(r.integer("homotopy.probes", 4, 0));
  c.probe_amplitude = r.positive("homotopy.probe_amplitude", c.probe_amplitude);
  c.homotopy.T = r.positive("homotopy.T", c.homotopy.T);
  c.homotopy.eps = r.positive("homotopy.eps", c.homotopy.eps);

  ConnectOptions& k = c.connect;
  k.eps_seed = r.positive("heteroclinic.eps_seed", k.eps_seed);
  k.T_max = r.positive("heteroclinic.T_max", k.T_max);
  k.conn_factor = r.positive("heteroclinic.conn_factor", k.conn_factor);
  k.series_stride = static_cast<std::size_t>(r.integer("heteroclinic.series_stride", 10, 1));
  c.write_trajectories = r.boolean("heteroclinic.write_trajectories", true);

  c.adm_count = static_cast<std::size_t>(r.integer("admissibility.count", 40, 1));
  c.adm_R = r.nonnegative("admissibility.R", 0.0);
  c.adm_k = r.nonnegative("admissibility.k", 0.0);
  c.adm_tau = r.nonnegative("admissibility.tau", 1.0);
  c.adm_amplitude = r.positive("admissibility.amplitude", 1.0);
  c.adm_window = static_cast<std::size_t>(r.integer("admissibility.window", 10, 2));

  c.conv_delta = r.nonnegative("convergence.delta", c.conv_delta);
  c.conv_T = r.positive("convergence.T", c.conv_T);
  if (!(c.conv_T > c.conv_delta)) r.problem("convergence.T", "must exceed convergence.delta");
  {
    const auto members = r.reals("convergence.members", {1, 2, 4, 8, 16, 32, 64});
    c.conv_members.clear();
    for (double m : members) {
      if (!(m >= 1.0) || m != std::floor(m)) {
        r.problem("convergence.members", "entries must be positive integers");
        break;
      }
      c.conv_members.push_back(static_cast<std::size_t>(m));
    }
  }
  if (r.at("convergence.perturbation")) c.conv_perturbation = r.well("convergence.perturbation");

  c.x_samples = static_cast<std::size_t>(r.integer("certify.x_samples", 201, 2));
  c.u_samples = static_cast<std::size_t>(r.integer("certify.u_samples", 201, 2));
  c.u_max = r.positive("certify.u_max", c.u_max);
  c.u_large_factor = r.positive("certify.u_large_factor", c.u_large_factor);

  // Section names themselves are known even when empty.
  for (const char* sec : {"grid", "model", "model.dissipativity", "run", "spectrum", "evolve",
                          "equilibria", "homotopy", "heteroclinic", "admissibility",
                          "convergence", "certify"}) {
    r.at(sec);
  }
  r.report_unknown();

  if (c.mode == DimMode::radial && c.dissipativity.q != 2.0) {
    problems.push_back("model.dissipativity.q: radial grids support q = 2 only");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));

  c.homotopy.dt = c.dt;
  c.homotopy.r_cap = c.r_cap;
  c.connect.dt = c.dt;
  c.connect.nu_tilde = c.nu_tilde;
  c.connect.resonance_tol = c.resonance_tol;
  c.connect.newton = c.seeds.newton;
  c.seeds.rng_seed = c.seed;
  if (c.adm_k == 0.0) c.adm_k = c.half_width / 2.0;

  std::ostringstream canon;
  canon << root;
  c.canonical = canon.str();
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path + ": cannot open"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, path);
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : cfg.canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Grid build_grid(const ExperimentConfig& cfg) {
  return cfg.mode == DimMode::line ? Grid::line(cfg.half_width, cfg.n_interior)
                                   : Grid::radial(cfg.half_width, cfg.n_interior, cfg.dimension);
}

NonlinearityModel build_model(const ExperimentConfig& cfg) {
  NonlinearityModel m =
      build_switch_model(cfg.alpha, cfg.gamma, cfg.switch_scale, cfg.dissipativity);
  if (!cfg.forcing.is_zero()) m = m.with_forcing(cfg.forcing);
  return m;
}

}  // namespace hetflow::cli
