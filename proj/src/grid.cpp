#include "hetflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hetflow/errors.hpp"
#include "hetflow/kernels.hpp"

namespace hetflow {

Grid::Grid(double half_width, std::size_t n, double h, DimMode mode, int dim)
    : half_width_(half_width), n_(n), h_(h), mode_(mode), dim_(dim) {
  auto g = std::make_shared<Geometry>();
  g->nodes.resize(n);
  g->cell_w.resize(n);
  g->face_w.resize(n + 1);
  if (mode == DimMode::line) {
    for (std::size_t i = 0; i < n; ++i) {
      g->nodes[i] = -half_width + static_cast<double>(i + 1) * h;
      g->cell_w[i] = h;
    }
    std::fill(g->face_w.begin(), g->face_w.end(), 1.0);
  } else {
    const double p = dim - 1;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = static_cast<double>(i + 1) * h;
      g->nodes[i] = r;
      g->cell_w[i] = h * std::pow(r, p);
    }
    g->face_w[0] = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      g->face_w[j] = std::pow((static_cast<double>(j) + 0.5) * h, p);
    }
  }
  geom_ = std::move(g);
}

Grid Grid::line(double half_width, std::size_t n_interior) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("grid half width must be positive, got " +
                                std::to_string(half_width));
  }
  if (n_interior < 3) {
    throw std::invalid_argument("grid needs at least 3 interior nodes, got " +
                                std::to_string(n_interior));
  }
  const double h = 2.0 * half_width / static_cast<double>(n_interior + 1);
  return Grid(half_width, n_interior, h, DimMode::line, 1);
}

Grid Grid::radial(double radius, std::size_t n_interior, int dimension) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("grid radius must be positive, got " + std::to_string(radius));
  }
  if (n_interior < 3) {
    throw std::invalid_argument("grid needs at least 3 interior nodes, got " +
                                std::to_string(n_interior));
  }
  if (dimension != 2 && dimension != 3) {
    throw std::invalid_argument("radial mode supports d = 2 or 3, got " +
                                std::to_string(dimension));
  }
  const double h = radius / static_cast<double>(n_interior + 1);
  return Grid(radius, n_interior, h, DimMode::radial, dimension);
}

Grid make_grid(double half_width, std::size_t n_interior, DimMode mode, int dimension) {
  return mode == DimMode::line ? Grid::line(half_width, n_interior)
                               : Grid::radial(half_width, n_interior, dimension);
}

double Grid::abs_node(std::size_t i) const noexcept { return std::abs(geom_->nodes[i]); }

Field::Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

Field::Field(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("field length " + std::to_string(values_.size()) +
                                " does not match grid size " + std::to_string(grid_.size()));
  }
  if (!all_finite()) throw std::invalid_argument("field has non-finite entries");
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& other) {
  if (!(grid_ == other.grid_)) throw GridMismatch();
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (!(grid_ == other.grid_)) throw GridMismatch();
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double c) noexcept {
  for (double& v : values_) v *= c;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double c, Field a) { return a *= c; }
Field operator-(Field a) { return a *= -1.0; }

double inner(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch();
  return kernels::weighted_dot(a.grid().cell_weights(), a.values(), b.values());
}

double h1_seminorm_sq(const Field& u) {
  const Grid& g = u.grid();
  return kernels::face_energy(g.face_weights(), g.spacing(), u.values());
}

double l2_norm(const Field& u) { return std::sqrt(inner(u, u)); }

Norms norms(const Field& u) {
  const double l2sq = inner(u, u);
  return {std::sqrt(l2sq), std::sqrt(l2sq + h1_seminorm_sq(u))};
}

double h1_distance(const Field& a, const Field& b) { return norms(a - b).h1; }
double l2_distance(const Field& a, const Field& b) { return l2_norm(a - b); }

namespace {

double bump(double t) noexcept { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double bump_derivative(double t) noexcept { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

}  // namespace

double ramp(double s) noexcept {
  if (s <= 1.0) return 0.0;
  if (s >= 2.0) return 1.0;
  const double a = bump(s - 1.0);
  const double b = bump(2.0 - s);
  return a / (a + b);
}

double ramp_derivative(double s) noexcept {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double a = bump(s - 1.0);
  const double b = bump(2.0 - s);
  const double da = bump_derivative(s - 1.0);
  const double db = -bump_derivative(2.0 - s);
  const double den = a + b;
  return (da * den - a * (da + db)) / (den * den);
}

double ramp_derivative_bound() {
  static const double bound = [] {
    // Coarse scan, then golden-section refinement around the best sample.
    constexpr int samples = 4000;
    double best_s = 1.5;
    double best = 0.0;
    for (int i = 1; i < samples; ++i) {
      const double s = 1.0 + static_cast<double>(i) / samples;
      const double v = std::abs(ramp_derivative(s));
      if (v > best) {
        best = v;
        best_s = s;
      }
    }
    double lo = std::max(1.0, best_s - 1.0 / samples);
    double hi = std::min(2.0, best_s + 1.0 / samples);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 100; ++it) {
      const double x1 = hi - phi * (hi - lo);
      const double x2 = lo + phi * (hi - lo);
      if (std::abs(ramp_derivative(x1)) > std::abs(ramp_derivative(x2))) {
        hi = x2;
      } else {
        lo = x1;
      }
    }
    return std::max(best, std::abs(ramp_derivative(0.5 * (lo + hi))));
  }();
  return bound;
}

Field cutoff_weights(const Grid& grid, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("cutoff radius k must be positive");
  std::vector<double> w(grid.size());
  const double inv_k2 = 1.0 / (k * k);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = grid.node(i);
    w[i] = ramp(x * x * inv_k2);
  }
  return Field(grid, std::move(w));
}

double tail_mass(const Field& u, double k) {
  const Grid& g = u.grid();
  const Field theta = cutoff_weights(g, k);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sum += g.cell_weight(i) * theta[i] * u[i] * u[i];
  }
  return sum;
}

}  // namespace hetflow
