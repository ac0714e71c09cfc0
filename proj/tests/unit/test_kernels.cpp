#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "hetflow/kernels.hpp"
#include "hetflow/model.hpp"
#include "hetflow/tridiag.hpp"

using namespace hetflow;

// Sizes straddle the fork threshold so both code paths of the OpenMP kernels run.
TEST_CASE("OpenMP kernels agree with the serial reference") {
  const NonlinearityModel m =
      build_switch_model({1.0, Well::square(2.0, 3.0)}, {1.0, Well::gaussian(4.0, 2.0)}, 0.7);
  for (std::size_t n : {std::size_t{100}, kernels::parallel_threshold + 17, std::size_t{50000}}) {
    const Grid g = make_grid(30.0, n);
    const NodalModel nm = m.sample(g);
    const TridiagOperator a = assemble_laplacian(g);
    std::mt19937_64 rng(n);
    std::uniform_real_distribution<double> d(-3, 3);
    std::vector<double> u(n), v(n);
    for (auto& x : u) x = d(rng);
    for (auto& x : v) x = d(rng);
    const auto w = g.cell_weights();

    const double dot_p = kernels::weighted_dot(w, u, v), dot_s = serial::weighted_dot(w, u, v);
    CHECK(dot_p == doctest::Approx(dot_s).epsilon(1e-12));
    const double fe_p = kernels::face_energy(g.face_weights(), g.spacing(), u);
    const double fe_s = serial::face_energy(g.face_weights(), g.spacing(), u);
    CHECK(fe_p == doctest::Approx(fe_s).epsilon(1e-12));
    const double pe_p = kernels::potential_energy(nm, w, u), pe_s = serial::potential_energy(nm, w, u);
    CHECK(pe_p == doctest::Approx(pe_s).epsilon(1e-12));

    std::vector<double> p(n), s(n);
    kernels::tridiag_apply(a.matrix().diag, a.matrix().off, u, p);
    serial::tridiag_apply(a.matrix().diag, a.matrix().off, u, s);
    CHECK(p == s);
    kernels::nemitski(nm, u, p);
    serial::nemitski(nm, u, s);
    CHECK(p == s);
    kernels::explicit_part(nm, u, p);
    serial::explicit_part(nm, u, s);
    CHECK(p == s);
    kernels::nemitski_derivative(nm, u, p);
    serial::nemitski_derivative(nm, u, s);
    CHECK(p == s);
  }
}
