#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hetflow/errors.hpp"
#include "hetflow/tridiag.hpp"
#include "oracles.hpp"

using namespace hetflow;

namespace {

SymTridiag random_tridiag(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  std::vector<double> diag(n), off(n - 1);
  for (auto& v : diag) v = d(rng);
  for (auto& v : off) v = d(rng);
  return {diag, off};
}

}  // namespace

TEST_CASE("inertia matches the dense oracle") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> size(2, 30);
  for (int trial = 0; trial < 40; ++trial) {
    const SymTridiag t = random_tridiag(rng, size(rng));
    const auto eig = oracle::jacobi_eigen(oracle::dense_tridiag(t.diag, t.off));
    std::uniform_real_distribution<double> shift(t.gershgorin_lower() - 1, t.gershgorin_upper() + 1);
    for (int s = 0; s < 20; ++s) {
      const double sigma = shift(rng);
      CHECK(inertia_below(t, sigma).count == oracle::count_below(eig, sigma));
    }
  }
}

TEST_CASE("inertia survives an exact zero pivot") {
  // First pivot of T - 0 I is exactly zero; eigenvalues are +-1.
  const SymTridiag t({0.0, 0.0}, {1.0});
  const Inertia in = inertia_below(t, 0.0);
  CHECK(in.singular);
  CHECK(in.count == 1);
}

TEST_CASE("gershgorin encloses the spectrum") {
  std::mt19937_64 rng(1);
  const SymTridiag t = random_tridiag(rng, 20);
  const auto eig = oracle::jacobi_eigen(oracle::dense_tridiag(t.diag, t.off));
  CHECK(eig.front() >= t.gershgorin_lower());
  CHECK(eig.back() <= t.gershgorin_upper());
}

TEST_CASE("shifted solve inverts T - sigma I") {
  std::mt19937_64 rng(9);
  const SymTridiag t = random_tridiag(rng, 25);
  std::vector<double> x(25), y(25);
  for (auto& v : x) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  const double sigma = 0.37;
  for (std::size_t i = 0; i < 25; ++i) {
    y[i] = (t.diag[i] - sigma) * x[i];
    if (i > 0) y[i] += t.off[i - 1] * x[i - 1];
    if (i + 1 < 25) y[i] += t.off[i] * x[i + 1];
  }
  const auto sol = solve_shifted(t, sigma, y);
  for (std::size_t i = 0; i < 25; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-9));
}

TEST_CASE("shifted solve reports a singular pivot at an eigenvalue") {
  const SymTridiag t({2.0, 2.0}, {1.0});
  const std::vector<double> rhs{1.0, 1.0};
  CHECK_THROWS_AS(solve_shifted(t, 3.0, rhs), SingularPivot);
  CHECK_NOTHROW(solve_shifted_guarded(t, 3.0, rhs));
}

TEST_CASE("line laplacian has the closed-form spectrum") {
  const std::size_t n = 40;
  const Grid g = make_grid(1.0, n);
  const TridiagOperator a = assemble_laplacian(g);
  const double h = g.spacing();
  const double L2 = 2.0;
  const auto eig = oracle::jacobi_eigen(oracle::dense_tridiag(a.matrix().diag, a.matrix().off));
  for (std::size_t j = 1; j <= n; ++j) {
    const double s = std::sin(j * std::numbers::pi * h / (2 * L2));
    CHECK(eig[j - 1] == doctest::Approx(4.0 / (h * h) * s * s).epsilon(1e-10));
  }
}

TEST_CASE("radial operator is self-adjoint in the weighted product") {
  const Grid g = Grid::radial(6.0, 59, 3);
  const TridiagOperator a = assemble_laplacian(g);
  const Field u = Field::sample(g, [](double r) { return std::exp(-r * r) * (1 + r); });
  const Field v = Field::sample(g, [](double r) { return std::cos(r) * std::exp(-0.3 * r * r); });
  CHECK(inner(apply(a, u), v) == doctest::Approx(inner(u, apply(a, v))).epsilon(1e-12));
}

TEST_CASE("radial laplacian converges at second order") {
  // Radial 3D laplacian of exp(-r^2) is (6 - 4 r^2) exp(-r^2).
  const auto max_error = [](std::size_t n) {
    const Grid g = Grid::radial(6.0, n, 3);
    const Field lap = apply(assemble_laplacian(g), Field::sample(g, [](double r) { return std::exp(-r * r); }));
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = g.node(i);
      if (r < 0.5 || r > 4.0) continue;
      err = std::max(err, std::abs(lap[i] - (6 - 4 * r * r) * std::exp(-r * r)));
    }
    return err;
  };
  const double coarse = max_error(59), fine = max_error(119);
  CHECK(coarse < 0.05);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("SPD factor solves the implicit step") {
  std::mt19937_64 rng(5);
  const Grid g = make_grid(3.0, 30);
  const SymTridiag t = assemble_laplacian(g).matrix();
  std::vector<double> damp(30), x(30), b(30);
  for (auto& v : damp) v = std::uniform_real_distribution<double>(0, 2)(rng);
  for (auto& v : x) v = std::uniform_real_distribution<double>(-1, 1)(rng);
  const double dt = 0.1;
  for (std::size_t i = 0; i < 30; ++i) {
    b[i] = x[i] + dt * ((t.diag[i] + damp[i]) * x[i]);
    if (i > 0) b[i] += dt * t.off[i - 1] * x[i - 1];
    if (i + 1 < 30) b[i] += dt * t.off[i] * x[i + 1];
  }
  SpdTridiagFactor(t, damp, dt).solve_in_place(b);
  for (std::size_t i = 0; i < 30; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-12));
}
