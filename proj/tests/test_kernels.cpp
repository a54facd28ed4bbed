#include "qglab/fem.hpp"
#include "qglab/kernels.hpp"
#include "qglab/secular.hpp"

#include <doctest.h>

using namespace qg;
using kernels::Exec;

TEST_SUITE("kernels") {
  TEST_CASE("element matrices of the unit right triangle") {
    kernels::TriangleGeom t{{0, 1, 2}, {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}};
    const auto l = kernels::p1_local(t);
    CHECK(l.area == doctest::Approx(0.5));
    CHECK(l.stiffness[0] == doctest::Approx(1.0));
    CHECK(l.stiffness[4] == doctest::Approx(0.5));
    CHECK(l.stiffness[1] == doctest::Approx(-0.5));
    CHECK(l.mass[0] == doctest::Approx(1.0 / 12));
    kernels::TriangleGeom flat{{0, 1, 2}, {Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)}};
    CHECK_THROWS_AS(kernels::p1_local(flat), Error);
  }

  TEST_CASE("serial and parallel element matrices are identical") {
    const auto tris = rectangle_triangles(2.0, 1.0, 60, 30);
    const auto a = kernels::p1_locals(tris, Exec::Serial);
    const auto b = kernels::p1_locals(tris, Exec::Parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].stiffness == b[i].stiffness);
      CHECK(a[i].mass == b[i].mass);
    }
  }

  TEST_CASE("serial and parallel quadratic forms are bit-identical") {
    const auto tris = rectangle_triangles(2.0, 1.0, 80, 40);
    const auto locals = kernels::p1_locals(tris, Exec::Serial);
    std::vector<char> sel(tris.size());
    for (std::size_t i = 0; i < sel.size(); ++i) sel[i] = (i % 3) != 0;
    Lcg rng(9);
    const Vec x = rng.vector(81 * 41);
    const auto s = kernels::quadratic_forms(tris, locals, sel, x, Exec::Serial);
    const auto p = kernels::quadratic_forms(tris, locals, sel, x, Exec::Parallel);
    CHECK(s.stiffness == p.stiffness);
    CHECK(s.mass == p.mass);
  }

  TEST_CASE("serial and parallel secular scans agree") {
    const SecularFunction f(graphs::theta({1.0, 1.5, 2.0}));
    std::vector<double> k;
    for (int i = 1; i <= 200; ++i) k.push_back(0.05 * i);
    const auto s = kernels::secular_scan(f, k, Exec::Serial);
    const auto p = kernels::secular_scan(f, k, Exec::Parallel);
    CHECK(s.determinant == p.determinant);
    CHECK(s.smallest_singular == p.smallest_singular);
  }

  TEST_CASE("assembled mass integrates constants to the area") {
    const auto tris = rectangle_triangles(2.0, 1.0, 10, 5);
    const auto sys = assemble_p1(tris, 11 * 6, Exec::Parallel);
    const Vec one = Vec::Ones(sys.dim());
    CHECK(one.dot(sys.M * one) == doctest::Approx(2.0));
    CHECK((sys.K * one).norm() < 1e-12);
  }
}
