#include "qglab/eigensolver.hpp"
#include "qglab/fem.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qg;
using std::numbers::pi;

TEST_SUITE("eigensolver") {
  TEST_CASE("iterative and dense paths agree on a rectangle") {
    const auto sys = assemble_p1(rectangle_triangles(2.0, 1.0, 40, 20), 41 * 21);
    EigOptions it;
    it.force_iterative = true;
    const auto a = smallest_eigenpairs(sys.K, sys.M, 6, it);
    const auto b = smallest_eigenpairs(sys.K, sys.M, 6);
    CHECK(b.dense);
    CHECK_FALSE(a.dense);
    for (int i = 0; i < 6; ++i) CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-8));
    // Neumann rectangle [0,2]x[0,1]: pi^2 (m^2/4 + n^2)
    CHECK(b.values[1] == doctest::Approx(pi * pi / 4).epsilon(2e-3));
    CHECK(b.values[2] == doctest::Approx(pi * pi).epsilon(2e-3));
    CHECK(a.residuals.maxCoeff() < 1e-6);
  }

  TEST_CASE("eigenvectors are M-orthonormal") {
    const auto sys = assemble_p1(rectangle_triangles(1.0, 1.0, 20, 20), 21 * 21);
    EigOptions it;
    it.force_iterative = true;
    const auto r = smallest_eigenpairs(sys.K, sys.M, 4, it);
    const Mat G = r.vectors.transpose() * (sys.M * r.vectors);
    CHECK((G - Mat::Identity(4, 4)).norm() < 1e-8);
  }

  TEST_CASE("the trace shift stays available") {
    const auto sys = assemble_p1(rectangle_triangles(1.0, 1.0, 10, 10), 121);
    EigOptions o;
    o.trace_shift = true;
    const auto r = smallest_eigenpairs(sys.K, sys.M, 2, o);
    CHECK(r.sigma < -1.0);
    EigOptions d;
    CHECK(smallest_eigenpairs(sys.K, sys.M, 2, d).sigma >= -0.1);
  }

  TEST_CASE("multiplicity clusters") {
    Vec v(5);
    v << 0.0, 1.0, 1.0 + 1e-9, 2.0, 3.0;
    const auto c = multiplicity_clusters(v);
    CHECK(c == std::vector<int>{0, 1, 1, 2, 3});
  }
}
