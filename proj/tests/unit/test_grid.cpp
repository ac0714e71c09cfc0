#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "hetflow/grid.hpp"
#include "oracles.hpp"

using namespace hetflow;

TEST_CASE("line grid geometry") {
  const Grid g = Grid::line(5.0, 9);
  CHECK(g.spacing() == doctest::Approx(1.0));
  CHECK(g.node(0) == doctest::Approx(-4.0));
  CHECK(g.node(8) == doctest::Approx(4.0));
  CHECK(g.face_weights().size() == 10);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.cell_weight(i) == doctest::Approx(1.0));
}

TEST_CASE("radial grid carries r^(d-1) weights") {
  const Grid g = Grid::radial(4.0, 3, 3);
  CHECK(g.spacing() == doctest::Approx(1.0));
  for (std::size_t i = 0; i < 3; ++i) {
    const double r = g.node(i);
    CHECK(g.cell_weight(i) == doctest::Approx(r * r));
  }
}

TEST_CASE("make_grid rejects bad input") {
  CHECK_THROWS_AS(make_grid(0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 10, DimMode::radial, 4), std::invalid_argument);
}

TEST_CASE("field rejects non-finite values and length mismatch") {
  const Grid g = make_grid(1.0, 5);
  CHECK_THROWS_AS(Field(g, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(Field(g, {1, 2, NAN, 4, 5}), std::invalid_argument);
}

TEST_CASE("norms of a sine mode match quadrature") {
  // u = sin(pi (x + L) / (2L)) vanishes at both ends.
  const double L = 2.0;
  const Grid g = make_grid(L, 399);
  const double k = std::numbers::pi / (2 * L);
  const Field u = Field::sample(g, [&](double x) { return std::sin(k * (x + L)); });
  const double l2sq = oracle::simpson([&](double x) { return std::pow(std::sin(k * (x + L)), 2); }, -L, L, 400);
  const double gradsq = oracle::simpson([&](double x) { return std::pow(k * std::cos(k * (x + L)), 2); }, -L, L, 400);
  const Norms nm = norms(u);
  CHECK(nm.l2 * nm.l2 == doctest::Approx(l2sq).epsilon(1e-6));
  CHECK(nm.h1 * nm.h1 == doctest::Approx(l2sq + gradsq).epsilon(1e-4));
}

TEST_CASE("radial l2 norm integrates with r^2 density") {
  const Grid g = Grid::radial(10.0, 1999, 3);
  const Field u = Field::sample(g, [](double r) { return std::exp(-r * r); });
  const double ref = oracle::simpson([](double r) { return r * r * std::exp(-2 * r * r); }, 0, 10, 4000);
  CHECK(l2_norm(u) * l2_norm(u) == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("ramp is a smooth step") {
  CHECK(ramp(0.5) == 0.0);
  CHECK(ramp(1.0) == 0.0);
  CHECK(ramp(2.0) == 1.0);
  CHECK(ramp(3.0) == 1.0);
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double s = 1.0 + i / 100.0;
    CHECK(ramp(s) >= prev);
    prev = ramp(s);
  }
  for (double s : {1.1, 1.4, 1.5, 1.8}) {
    CHECK(ramp_derivative(s) ==
          doctest::Approx(oracle::central_difference(ramp, s, 1e-6)).epsilon(1e-6));
  }
  double sup = 0.0;
  for (int i = 0; i <= 100000; ++i) sup = std::max(sup, std::abs(ramp_derivative(1.0 + i / 1e5)));
  CHECK(ramp_derivative_bound() >= sup * (1 - 1e-12));
  CHECK(ramp_derivative_bound() == doctest::Approx(sup).epsilon(1e-6));
}

TEST_CASE("tail mass vanishes for compact support inside k") {
  const Grid g = make_grid(10.0, 199);
  const Field u = Field::sample(g, [](double x) { return std::abs(x) < 2.0 ? 1.0 : 0.0; });
  CHECK(tail_mass(u, 3.0) == 0.0);
  CHECK(tail_mass(u, 1.0) > 0.0);
  CHECK(tail_mass(u, 1.0) <= l2_norm(u) * l2_norm(u));
  CHECK_THROWS_AS(cutoff_weights(g, 0.0), std::invalid_argument);
}
