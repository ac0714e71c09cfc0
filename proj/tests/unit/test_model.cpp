#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "hetflow/model.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace hetflow;

namespace {

NonlinearityModel sample_model() {
  return build_switch_model({0.7, Well::square(0.4, 2.0)}, {1.3, Well::gaussian(3.0, 1.5)}, 0.8);
}

}  // namespace

TEST_CASE("switch pieces") {
  CHECK(switch_psi(0.0) == 0.0);
  CHECK(switch_psi(1.0) == doctest::Approx(0.5));
  double sup = 0.0;
  for (int i = -4000; i <= 4000; ++i) {
    const double v = i / 100.0;
    const double d = oracle::central_difference([](double s) { return s * switch_psi(s); }, v, 1e-5);
    CHECK(switch_dpsi(v) == doctest::Approx(d).epsilon(1e-7));
    CHECK(switch_dpsi(v) >= 0.0);
    sup = std::max(sup, switch_dpsi(v));
  }
  CHECK(sup <= 9.0 / 8.0 + 1e-15);
  CHECK(switch_energy(1e-5) == doctest::Approx(5e-21).epsilon(1e-6));
}

TEST_CASE("dF matches central differences") {
  const NonlinearityModel m = sample_model();
  for (double x : {0.0, 0.3, 1.7, 2.5}) {
    for (double u : {-5.0, -0.4, 0.3, 1.7, 12.0}) {
      const auto f = [&](double s) { return m.F(x, s); };
      for (double h : {1e-5, 1e-6}) {
        CHECK(m.dF(x, u) == doctest::Approx(oracle::central_difference(f, u, h)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("P is the primitive of F") {
  const NonlinearityModel m = sample_model();
  for (double x : {0.3, 1.7}) {
    for (double u : {-3.0, 0.5, 4.0}) {
      const double ref = oracle::simpson([&](double s) { return m.F(x, s); }, 0.0, u, 2000);
      CHECK(std::abs(m.P(x, u) - ref) <= 1e-10 * (1.0 + std::abs(ref)));
    }
  }
}

TEST_CASE("F vanishes at zero without forcing and has the prescribed slopes") {
  const NonlinearityModel m = sample_model();
  for (double x : {0.0, 0.5, 1.9, 3.0}) {
    CHECK(m.F(x, 0.0) == 0.0);
    CHECK(m.dF(x, 0.0) == doctest::Approx(m.gamma(x)));
    CHECK(m.F(x, 1e7) / 1e7 == doctest::Approx(m.alpha(x)).epsilon(1e-10));
  }
  const auto xs = lattice(-5, 5, 41);
  const SlopeDeviation dev = check_asymptotic_slopes(m, xs, 1e6, 1e-6);
  CHECK(dev.dev_inf < 1e-10);
  CHECK(dev.dev_zero < 1e-12);
  CHECK(dev.dev_small < 1e-10);
}

TEST_CASE("derivative bound dominates sampled slopes") {
  const NonlinearityModel m = sample_model();
  const GrowthCheck gc = check_growth(m, lattice(-6, 6, 61), lattice(-20, 20, 801));
  CHECK(gc.certified());
}

TEST_CASE("automatic b makes the switch family dissipative") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> amp(-2.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const NonlinearityModel m = build_switch_model({1.0, Well::gaussian(amp(rng), 1.0)},
                                                   {1.0, Well::square(amp(rng), 2.0)}, 1.0);
    const auto cert = check_dissipativity(m, lattice(-6, 6, 121), lattice(-50, 50, 401));
    CHECK(cert.certified());
  }
}

TEST_CASE("dissipativity fails when the bound is too strong") {
  DissipativityData d;
  d.nu = 5.0;
  d.b_auto = false;
  const NonlinearityModel m = make_linear_model(Profile::uniform(-1.0), d);
  const auto cert = check_dissipativity(m, lattice(-1, 1, 5), lattice(-2, 2, 9));
  CHECK_FALSE(cert.certified());
  CHECK(cert.max_violation == doctest::Approx(16.0));
}

TEST_CASE("homotopy endpoints") {
  const NonlinearityModel m = scenario::switch_well(3.0);
  const NonlinearityModel lin = m.homotopy_to_linear(0.0);
  const NonlinearityModel same = m.homotopy_to_linear(1.0);
  for (double u : {-2.0, 0.1, 3.0}) {
    CHECK(lin.F(0.2, u) == doctest::Approx(m.alpha(0.2) * u));
    CHECK(same.F(0.2, u) == doctest::Approx(m.F(0.2, u)));
  }
}

TEST_CASE("build_switch_model validates its input") {
  CHECK_THROWS_AS(build_switch_model({1.0, {}}, {1.0, {}}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_switch_model({-1.0, {}}, {1.0, {}}, 1.0), std::invalid_argument);
}

TEST_CASE("nodal sample agrees with the model") {
  const NonlinearityModel m = sample_model();
  const Grid g = make_grid(4.0, 31);
  const NodalModel nm = m.sample(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(nm.F(i, 0.7) == doctest::Approx(m.F(g.node(i), 0.7)));
    CHECK(nm.dF(i, -1.1) == doctest::Approx(m.dF(g.node(i), -1.1)));
    CHECK(nm.P(i, 2.0) == doctest::Approx(m.P(g.node(i), 2.0)));
    CHECK(nm.damping[i] >= 0.0);
  }
}
