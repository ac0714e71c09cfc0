#include <cmath>

#include "doctest.h"
#include "hetflow/connect.hpp"
#include "hetflow/errors.hpp"
#include "scenarios.hpp"

using namespace hetflow;

TEST_CASE("connections from 0 in the one-well scenario") {
  const Grid g = make_grid(20.0, 399);
  const TridiagOperator a = assemble_laplacian(g);
  const NonlinearityModel m = scenario::switch_well(3.0);
  SeedStrategy s;
  s.random_seeds = 4;
  auto census = find_equilibria(m, a, s);
  const std::size_t before = census.size();
  const ConnectionSearch r = heteroclinic_search(m, a, census);
  CHECK(r.m == 0);
  CHECK(r.m_prime == 1);
  CHECK(r.attempts.size() == 2);
  CHECK_FALSE(r.falsified());
  CHECK(census.size() == before);
  REQUIRE(r.records.size() == 2);
  for (const auto& c : r.records) {
    CHECK(c.valid());
    CHECK(c.source.trivial);
    CHECK(c.eigenvalue < 0.0);
    CHECK(c.energy_drop == doctest::Approx(-c.target.energy));
  }
  // The two signs reach the odd pair.
  CHECK(r.records[0].target_id != r.records[1].target_id);
  CHECK(r.records[0].sign == -r.records[1].sign);
  CHECK(h1_distance(r.records[0].target.u_star, -r.records[1].target.u_star) <= r.records[0].conn_tol);
}

TEST_CASE("heteroclinic search preconditions") {
  const Grid g = make_grid(20.0, 199);
  const TridiagOperator a = assemble_laplacian(g);
  std::vector<Equilibrium> census;
  CHECK_THROWS_AS(heteroclinic_search(scenario::switch_well(0.0), a, census), PreconditionError);
  const NonlinearityModel forced = scenario::switch_well(3.0).with_forcing(Profile{0.0, {Well::gaussian(0.1, 1.0)}});
  CHECK_THROWS_AS(heteroclinic_search(forced, a, census), PreconditionError);
}

TEST_CASE("classify_limit ignores runs that never settle") {
  const Grid g = make_grid(10.0, 99);
  const TridiagOperator a = assemble_laplacian(g);
  const NonlinearityModel m = scenario::switch_well(3.0);
  std::vector<Equilibrium> census;
  const TrajectoryRecord rec = evolve(random_bump_field(g, 1, 1.0), m, a, 0.1, 0.01);
  CHECK_FALSE(classify_limit(rec, m, a, census).has_value());
  CHECK(census.empty());
}

TEST_CASE("record invariants") {
  const Grid g = make_grid(5.0, 19);
  Equilibrium src{Field(g)};
  src.trivial = true;
  Equilibrium dst{Field(g)};
  ConnectionRecord c{src, dst, 0, Field(g), 1, -1.0, TrajectoryRecord{}};
  c.energy_drop = 0.1;
  c.closeness = 0.0;
  c.conn_tol = 1e-6;
  CHECK(c.valid());
  c.trajectory.max_energy_increase = 1.0;
  CHECK_FALSE(c.valid());
  c.trajectory.max_energy_increase = 0.0;
  c.energy_drop = -0.1;
  CHECK_FALSE(c.valid());
  c.energy_drop = 0.1;
  c.target.trivial = true;
  CHECK_FALSE(c.valid());
}
