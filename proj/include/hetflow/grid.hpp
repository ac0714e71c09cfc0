#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace hetflow {

enum class DimMode { line, radial };

/// Uniform truncated mesh with homogeneous Dirichlet data at the outer edge.
///
/// Line mode covers [-L, L] with nodes x_i = -L + i*h, i = 1..n and
/// h = 2L/(n+1). Radial mode covers [0, L] for radially symmetric fields in
/// d = 2 or 3 dimensions, nodes r_i = i*h with h = L/(n+1). Radial integrals
/// carry the density r^(d-1) and are taken per unit solid angle; the face at
/// r = h/2 has zero flux (regularity at the origin).
///
/// Node indices in the API are 0-based: node(0) is the first interior node.
class Grid {
 public:
  static Grid line(double half_width, std::size_t n_interior);
  static Grid radial(double radius, std::size_t n_interior, int dimension);

  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  DimMode mode() const noexcept { return mode_; }
  /// 1 in line mode, d in radial mode.
  int dimension() const noexcept { return dim_; }

  double node(std::size_t i) const noexcept { return geom_->nodes[i]; }
  double abs_node(std::size_t i) const noexcept;
  /// Quadrature weight of node i: h (line) or h*r_i^(d-1) (radial).
  double cell_weight(std::size_t i) const noexcept { return geom_->cell_w[i]; }
  /// Weight of face j, the bond between node j-1 and node j, j = 0..n.
  /// Faces 0 and n touch the boundary.
  double face_weight(std::size_t j) const noexcept { return geom_->face_w[j]; }

  std::span<const double> nodes() const noexcept { return geom_->nodes; }
  std::span<const double> cell_weights() const noexcept { return geom_->cell_w; }
  /// n+1 face weights.
  std::span<const double> face_weights() const noexcept { return geom_->face_w; }

  bool operator==(const Grid& o) const noexcept {
    return half_width_ == o.half_width_ && n_ == o.n_ && mode_ == o.mode_ && dim_ == o.dim_;
  }

 private:
  struct Geometry {
    std::vector<double> nodes;
    std::vector<double> cell_w;
    std::vector<double> face_w;
  };

  Grid(double half_width, std::size_t n, double h, DimMode mode, int dim);

  double half_width_;
  std::size_t n_;
  double h_;
  DimMode mode_;
  int dim_;
  std::shared_ptr<const Geometry> geom_;
};

/// Throws std::invalid_argument for L <= 0, n < 3 or an unsupported dimension.
Grid make_grid(double half_width, std::size_t n_interior, DimMode mode = DimMode::line,
               int dimension = 3);

/// Real-valued grid function; the state of the semiflow.
class Field {
 public:
  explicit Field(Grid grid);
  /// Throws std::invalid_argument on length mismatch or non-finite entries.
  Field(Grid grid, std::vector<double> values);

  template <typename Fn>
  static Field sample(const Grid& grid, Fn&& fn) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.node(i));
    return Field(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  bool all_finite() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double c) noexcept;

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double c, Field a);
Field operator-(Field a);

/// Weighted discrete L2 inner product.
double inner(const Field& a, const Field& b);

struct Norms {
  double l2 = 0.0;
  double h1 = 0.0;
};

/// Discrete L2 and H1 norms; the H1 seminorm uses forward differences with
/// zero padding at the Dirichlet boundary.
Norms norms(const Field& u);
double l2_norm(const Field& u);
double h1_seminorm_sq(const Field& u);
double h1_distance(const Field& a, const Field& b);
double l2_distance(const Field& a, const Field& b);

/// Smooth ramp: 0 on s <= 1, 1 on s >= 2, built from exp(-1/t) pieces.
double ramp(double s) noexcept;
double ramp_derivative(double s) noexcept;
/// sup |ramp'|, located numerically once and cached.
double ramp_derivative_bound();

/// theta_k(x) = ramp(|x|^2 / k^2) at the nodes. Throws for k <= 0.
Field cutoff_weights(const Grid& grid, double k);

/// Weighted tail mass sum_i w_i theta_k(x_i) u_i^2.
double tail_mass(const Field& u, double k);

}  // namespace hetflow
