#include "qglab/secular.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qg;
using std::numbers::pi;

TEST_SUITE("secular") {
  TEST_CASE("single edge gives Neumann eigenvalues n^2") {
    const auto ev = secular_first_eigenvalues(graphs::single_edge(pi), 5);
    REQUIRE(ev.size() >= 5);
    for (int n = 0; n < 5; ++n) CHECK(ev[static_cast<std::size_t>(n)] == doctest::Approx(n * n).epsilon(1e-9));
  }

  TEST_CASE("cycle of length 2 pi has double eigenvalues") {
    const auto ev = secular_first_eigenvalues(graphs::two_edge_cycle(pi), 5);
    CHECK(ev[0] == doctest::Approx(0.0));
    CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ev[2] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ev[3] == doctest::Approx(4.0).epsilon(1e-9));
  }

  TEST_CASE("equilateral star") {
    // Kirchhoff star with unit edges: cos(k) = 0 (double) or sin(k) = 0 (simple)
    const auto ev = secular_first_eigenvalues(graphs::star({1.0, 1.0, 1.0}), 4);
    CHECK(ev[1] == doctest::Approx(pi * pi / 4).epsilon(1e-9));
    CHECK(ev[2] == doctest::Approx(pi * pi / 4).epsilon(1e-9));
    CHECK(ev[3] == doctest::Approx(pi * pi).epsilon(1e-9));
  }

  TEST_CASE("scattering matrix is unitary and the determinant is real") {
    const SecularFunction f(graphs::theta({1.0, 1.5, 2.0}));
    const auto U = f.unitary(1.7);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(U.rows(), U.cols());
    CHECK((U.adjoint() * U - I).norm() < 1e-12);
    CHECK(std::isfinite(f.real_determinant(1.7)));
  }
}
