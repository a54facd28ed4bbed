#include "qglab/mg_operators.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qg;
using std::numbers::pi;

TEST_SUITE("mg_operators") {
  TEST_CASE("grid layout") {
    const auto g = graphs::single_edge(1.0);
    const MgGrid grid(g, 0.1);
    CHECK(grid.cells(0) == 10);
    CHECK(grid.num_function_dofs() == 11);
    CHECK(grid.num_form_dofs() == 11);
    CHECK(grid.function_dof(0, 0) == g.edge(0).init);
    CHECK(grid.function_dof(0, 10) == g.edge(0).term);
    CHECK_THROWS_AS(MgGrid(g, 1.5), Error);
  }

  TEST_CASE("Kirchhoff pair is symmetric and annihilates constants") {
    const auto g = graphs::theta({1.0, 1.5, 2.0});
    const auto op = assemble_kirchhoff_laplacian(g, 0.05);
    CHECK((SpMat(op.K.transpose()) - op.K).norm() < 1e-12);
    CHECK((op.K * Vec::Ones(op.dim())).norm() < 1e-10);
    // total mass is the total length
    CHECK(Vec::Ones(op.dim()).dot(op.M * Vec::Ones(op.dim())) == doctest::Approx(4.5));
  }

  TEST_CASE("single edge spectrum converges at second order") {
    const auto g = graphs::single_edge(pi);
    double prev = 0.0;
    for (double h : {0.02, 0.01}) {
      const auto ev = kirchhoff_spectrum(MgGrid(g, h), 3);
      CHECK(std::abs(ev.values[0]) < 1e-9);
      const double err = std::abs(ev.values[1] - 1.0);
      if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
      prev = err;
    }
  }

  TEST_CASE("gradient of an interpolated linear function") {
    const auto g = graphs::single_edge(2.0);
    const MgGrid grid(g, 0.1);
    const auto f = interpolate(grid, [](int, double s) { return 3.0 * s; });
    const auto F = mg_gradient(grid, f);
    for (Eigen::Index i = 0; i < F.dofs.size(); ++i) CHECK(F.dofs[i] == doctest::Approx(3.0));
  }

  TEST_CASE("vertex flux of harmonic forms vanishes") {
    const auto g = graphs::theta({1.0, 1.5, 2.0});
    const MgGrid grid(g, 0.1);
    const auto basis = harmonic_oneform_basis(grid);
    CHECK(basis.size() == 2);
    for (const auto& F : basis) CHECK(vertex_flux(grid, F).norm() < 1e-12);
    CHECK(divergence_kernel_dimension(grid) == 2);
  }

  TEST_CASE("objects from different grids are rejected") {
    const auto g = graphs::single_edge(1.0);
    const MgGrid a(g, 0.1), b(g, 0.05);
    const auto f = interpolate(a, [](int, double s) { return s; });
    CHECK_THROWS_AS(mg_gradient(b, f), Error);
  }

  TEST_CASE("Dirac spectrum is symmetric with kernel b0 + b1") {
    const auto g = graphs::two_edge_cycle(pi);
    const auto d = mg_dirac_spectrum(g, 0.01, 6);
    int zeros = 0;
    for (double x : d) zeros += std::abs(x) < 1e-6 ? 1 : 0;
    CHECK(zeros == 2);
  }
}
