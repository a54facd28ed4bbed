#include "qglab/fem.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace qg;
using std::numbers::pi;

TEST_SUITE("fem") {
  TEST_CASE("Neumann eigenvalues of a rectangle converge at second order") {
    double prev = 0.0;
    for (int n : {10, 20, 40}) {
      const auto sys = assemble_p1(rectangle_triangles(1.0, 1.0, n, n), (n + 1) * (n + 1));
      const auto r = smallest_eigenpairs(sys, 2);
      const double err = std::abs(r.values[1] - pi * pi);
      if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.15));
      prev = err;
    }
  }

  TEST_CASE("graph-like space spectrum approaches the star graph") {
    const auto g = graphs::star({1.0, 1.0, 1.0});
    const auto m = build_abstract_space(g, {}, 0.1, 0.025);
    const auto sys = assemble_neumann(m);
    const auto r = smallest_eigenpairs(sys, 3);
    CHECK(std::abs(r.values[0]) < 1e-8);
    CHECK(r.values[1] == doctest::Approx(pi * pi / 4).epsilon(0.25));
    CHECK(r.values[1] < pi * pi / 4);
  }

  TEST_CASE("region quadratic forms add up") {
    const auto g = graphs::theta({1.0, 1.5, 2.0});
    const auto m = build_abstract_space(g, {}, 0.2, 0.05);
    const auto sys = assemble_neumann(m);
    Lcg rng(2);
    const Vec x = rng.vector(sys.dim());
    const auto all = rayleigh_region(sys, x, "all");
    double k = 0, mm = 0;
    for (const std::string name : {"vertex:a", "vertex:b", "edge:e0", "edge:e1", "edge:e2"}) {
      const auto f = rayleigh_region(sys, x, name);
      k += f.dirichlet_energy;
      mm += f.mass;
    }
    CHECK(k == doctest::Approx(all.dirichlet_energy).epsilon(1e-12));
    CHECK(mm == doctest::Approx(all.mass).epsilon(1e-12));
    CHECK(all.mass == doctest::Approx(x.dot(sys.M * x)).epsilon(1e-12));
    const auto serial = rayleigh_region(sys, x, "star:a", kernels::Exec::Serial);
    const auto par = rayleigh_region(sys, x, "star:a", kernels::Exec::Parallel);
    CHECK(serial.mass == par.mass);
  }

  TEST_CASE("serial and parallel assembly agree") {
    const auto m = build_abstract_space(graphs::star({1.0, 1.0, 1.0}), {}, 0.2, 0.05);
    const auto a = assemble_neumann(m, kernels::Exec::Serial);
    const auto b = assemble_neumann(m, kernels::Exec::Parallel);
    CHECK((a.K - b.K).norm() == 0.0);
    CHECK((a.M - b.M).norm() == 0.0);
  }

  TEST_CASE("plain triangulations know only the region all") {
    const auto sys = assemble_p1(rectangle_triangles(1.0, 1.0, 4, 4), 25);
    CHECK_THROWS_AS(rayleigh_region(sys, Vec::Ones(25), "vertex:a"), Error);
    std::ostringstream out;
    write_coo(out, sys.M);
    CHECK(!out.str().empty());
  }
}
