#include "hetflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hetflow {

double Well::value(double abs_x) const noexcept {
  switch (kind) {
    case WellKind::zero:
      return 0.0;
    case WellKind::gaussian: {
      const double z = abs_x / width;
      return amplitude * std::exp(-z * z);
    }
    case WellKind::square:
      return abs_x < width ? amplitude : 0.0;
  }
  return 0.0;
}

double Well::sup_abs() const noexcept {
  return kind == WellKind::zero ? 0.0 : std::abs(amplitude);
}

Profile Profile::from(const PotentialSpec& spec) {
  Profile p{-spec.base_level, {}};
  if (spec.well.kind != WellKind::zero) p.wells.push_back(spec.well);
  return p;
}

double Profile::value(double abs_x) const noexcept {
  double v = constant;
  for (const Well& w : wells) v += w.value(abs_x);
  return v;
}

double Profile::sup_abs_bound() const noexcept {
  double s = std::abs(constant);
  for (const Well& w : wells) s += w.sup_abs();
  return s;
}

bool Profile::is_zero() const noexcept {
  return constant == 0.0 &&
         std::all_of(wells.begin(), wells.end(), [](const Well& w) { return w.sup_abs() == 0.0; });
}

Profile Profile::scaled(double factor) const {
  Profile p{constant * factor, wells};
  for (Well& w : p.wells) w.amplitude *= factor;
  return p;
}

Profile Profile::plus(const Profile& other) const {
  Profile p{constant + other.constant, wells};
  p.wells.insert(p.wells.end(), other.wells.begin(), other.wells.end());
  return p;
}

double switch_psi(double v) noexcept {
  const double v2 = v * v;
  return v2 > 1.0 ? 1.0 / (1.0 + 1.0 / v2) : v2 / (1.0 + v2);
}

double switch_dpsi(double v) noexcept {
  const double v2 = v * v;
  if (v2 > 1.0) {
    const double w = 1.0 / v2;
    return (1.0 + 3.0 * w) / ((1.0 + w) * (1.0 + w));
  }
  const double d = 1.0 + v2;
  return v2 * (v2 + 3.0) / (d * d);
}

double switch_energy(double v) noexcept {
  const double w = v * v;
  if (w < 1e-3) {
    // w - log1p(w) = w^2/2 - w^3/3 + w^4/4 - ...
    return w * w * (0.5 - w * (1.0 / 3.0 - w * (0.25 - w * (0.2 - w / 6.0))));
  }
  return w - std::log1p(w);
}

namespace {

// Shared closed forms; a = alpha(x), g = gamma(x), f = forcing(x).
inline double switch_F(double a, double g, double f, double s0, double u) noexcept {
  return g * u + (a - g) * u * switch_psi(u / s0) + f;
}

inline double switch_dF(double a, double g, double s0, double u) noexcept {
  return g + (a - g) * switch_dpsi(u / s0);
}

inline double switch_P(double a, double g, double f, double s0, double u) noexcept {
  return 0.5 * g * u * u + (a - g) * 0.5 * s0 * s0 * switch_energy(u / s0) + f * u;
}

// dF lies in [min(a,g) - |a-g|/8, max(a,g) + |a-g|/8].
inline double derivative_hull_abs(double a, double g, double shift) noexcept {
  const double gap = std::abs(a - g);
  const double lo = std::min(a, g) - gap / 8.0 + shift;
  const double hi = std::max(a, g) + gap / 8.0 + shift;
  return std::max(std::abs(lo), std::abs(hi));
}

}  // namespace

double NodalModel::F(std::size_t i, double u) const noexcept {
  return switch_F(alpha[i], gamma[i], forcing[i], switch_scale, u);
}

double NodalModel::dF(std::size_t i, double u) const noexcept {
  return switch_dF(alpha[i], gamma[i], switch_scale, u);
}

double NodalModel::P(std::size_t i, double u) const noexcept {
  return switch_P(alpha[i], gamma[i], forcing[i], switch_scale, u);
}

double NodalModel::explicit_lipschitz_bound() const noexcept {
  double lip = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    lip = std::max(lip, derivative_hull_abs(alpha[i], gamma[i], damping[i]));
  }
  return lip;
}

NonlinearityModel::NonlinearityModel(Profile alpha, Profile gamma, double switch_scale,
                                     Profile forcing, DissipativityData dissipativity)
    : alpha_(std::move(alpha)),
      gamma_(std::move(gamma)),
      forcing_(std::move(forcing)),
      s0_(switch_scale),
      diss_(std::move(dissipativity)) {
  if (!(s0_ > 0.0)) throw std::invalid_argument("switch scale s0 must be positive");
  if (!(diss_.nu > 0.0)) throw std::invalid_argument("dissipativity nu must be positive");
  if (!(diss_.q >= 2.0)) throw std::invalid_argument("dissipativity exponent q must be >= 2");
}

double NonlinearityModel::b(double x) const noexcept {
  if (diss_.b_auto) return std::max(0.0, std::max(alpha(x), gamma(x)) + diss_.nu);
  return diss_.b.value(std::abs(x));
}

double NonlinearityModel::c(double x) const noexcept { return diss_.c.value(std::abs(x)); }

double NonlinearityModel::F(double x, double u) const noexcept {
  return switch_F(alpha(x), gamma(x), forcing(x), s0_, u);
}

double NonlinearityModel::dF(double x, double u) const noexcept {
  return switch_dF(alpha(x), gamma(x), s0_, u);
}

double NonlinearityModel::P(double x, double u) const noexcept {
  return switch_P(alpha(x), gamma(x), forcing(x), s0_, u);
}

double NonlinearityModel::derivative_bound() const noexcept {
  return std::max(alpha_.sup_abs_bound(), gamma_.sup_abs_bound()) + slope_gap_bound() / 8.0;
}

double NonlinearityModel::slope_gap_bound() const noexcept {
  return alpha_.plus(gamma_.scaled(-1.0)).sup_abs_bound();
}

NonlinearityModel NonlinearityModel::with_forcing(const Profile& extra) const {
  return NonlinearityModel(alpha_, gamma_, s0_, forcing_.plus(extra), diss_);
}

NonlinearityModel NonlinearityModel::homotopy_to_linear(double lambda) const {
  // lambda*F + (1-lambda)*alpha*u has slope at zero lambda*gamma + (1-lambda)*alpha,
  // the same slope alpha at infinity and forcing lambda*f.
  Profile g = gamma_.scaled(lambda).plus(alpha_.scaled(1.0 - lambda));
  return NonlinearityModel(alpha_, std::move(g), s0_, forcing_.scaled(lambda), diss_);
}

NonlinearityModel NonlinearityModel::with_dissipativity(DissipativityData d) const {
  return NonlinearityModel(alpha_, gamma_, s0_, forcing_, std::move(d));
}

NodalModel NonlinearityModel::sample(const Grid& grid) const {
  NodalModel m{grid, {}, {}, {}, {}, s0_};
  const std::size_t n = grid.size();
  m.alpha.resize(n);
  m.gamma.resize(n);
  m.forcing.resize(n);
  m.damping.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.abs_node(i);
    m.alpha[i] = alpha_.value(r);
    m.gamma[i] = gamma_.value(r);
    m.forcing[i] = forcing_.value(r);
    m.damping[i] = std::max(0.0, -std::min(m.alpha[i], m.gamma[i]));
  }
  return m;
}

NonlinearityModel build_switch_model(const PotentialSpec& alpha, const PotentialSpec& gamma,
                                     double switch_scale) {
  DissipativityData d;
  d.nu = std::min(alpha.base_level, gamma.base_level);
  return build_switch_model(alpha, gamma, switch_scale, d);
}

NonlinearityModel build_switch_model(const PotentialSpec& alpha, const PotentialSpec& gamma,
                                     double switch_scale, DissipativityData dissipativity) {
  if (!(switch_scale > 0.0)) throw std::invalid_argument("switch scale s0 must be positive");
  if (!(alpha.base_level > 0.0) || !(gamma.base_level > 0.0)) {
    throw std::invalid_argument("potential base levels must be positive");
  }
  return NonlinearityModel(Profile::from(alpha), Profile::from(gamma), switch_scale, {},
                           std::move(dissipativity));
}

NonlinearityModel make_linear_model(const Profile& slope, DissipativityData dissipativity) {
  return NonlinearityModel(slope, slope, 1.0, {}, std::move(dissipativity));
}

bool DissipativityCertificate::certified() const noexcept {
  return max_violation <= 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
}

DissipativityCertificate check_dissipativity(const NonlinearityModel& m,
                                             std::span<const double> x_samples,
                                             std::span<const double> u_samples) {
  if (x_samples.empty() || u_samples.empty()) {
    throw std::invalid_argument("dissipativity check needs nonempty sample sets");
  }
  const auto& d = m.dissipativity();
  DissipativityCertificate cert;
  cert.nu = d.nu;
  cert.max_violation = -std::numeric_limits<double>::infinity();
  for (double x : x_samples) {
    const double bx = m.b(x);
    const double cx = m.c(x);
    for (double u : u_samples) {
      const double au = std::abs(u);
      const double fu = m.F(x, u) * u;
      const double damp = d.nu * au * au;
      const double grow = bx * std::pow(au, d.q);
      const double v = fu + damp - grow - cx;
      cert.max_violation = std::max(cert.max_violation, v);
      cert.scale = std::max({cert.scale, std::abs(fu), damp, grow, std::abs(cx)});
      ++cert.samples;
    }
  }
  return cert;
}

SlopeDeviation check_asymptotic_slopes(const NonlinearityModel& m,
                                       std::span<const double> x_samples, double u_large,
                                       double u_small) {
  if (!(u_large > u_small) || !(u_small > 0.0)) {
    throw std::invalid_argument("need u_large > u_small > 0");
  }
  SlopeDeviation dev;
  for (double x : x_samples) {
    dev.dev_inf = std::max(dev.dev_inf, std::abs(m.F(x, u_large) / u_large - m.alpha(x)));
    dev.dev_zero = std::max(dev.dev_zero, std::abs(m.dF(x, 0.0) - m.gamma(x)));
    dev.dev_small = std::max(dev.dev_small, std::abs(m.F(x, u_small) / u_small - m.gamma(x)));
  }
  return dev;
}

GrowthCheck check_growth(const NonlinearityModel& m, std::span<const double> x_samples,
                         std::span<const double> u_samples) {
  GrowthCheck g;
  g.bound = m.derivative_bound();
  for (double x : x_samples) {
    for (double u : u_samples) {
      g.max_abs_derivative = std::max(g.max_abs_derivative, std::abs(m.dF(x, u)));
    }
  }
  return g;
}

std::vector<double> lattice(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = 0.5 * (lo + hi);
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

}  // namespace hetflow
