#include "qglab/identification.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qg;
using std::numbers::pi;

TEST_SUITE("identification") {
  TEST_CASE("J0 maps constants to eps^{-1/2} on tubes and 0 on vertex regions") {
    const auto g = graphs::star({1.0, 1.0, 1.0});
    const double eps = 0.2;
    const auto m = build_abstract_space(g, {}, eps, 0.05);
    const auto sys = assemble_neumann(m);
    const MgGrid grid = matching_grid(m);
    const auto mg = assemble_kirchhoff_laplacian(grid);
    const auto J = build_J0(grid, mg.M, m, sys.M);
    const Vec u = J.apply(Vec::Ones(grid.num_function_dofs()));
    const auto& tube = m.tubes[0];
    CHECK(u[tube.node(tube.nx / 2, 1)] == doctest::Approx(1.0 / std::sqrt(eps)));
    const auto& patch = m.patches[0];
    int interior = 0;
    for (int node : patch.nodes) {
      bool on_port = false;
      for (const auto& p : m.ports)
        for (int q : p.nodes) on_port |= q == node;
      if (!on_port) {
        CHECK(u[node] == 0.0);
        ++interior;
      }
    }
    CHECK(interior > 0);
  }

  TEST_CASE("adjoint identity and J*J on functions vanishing at vertices") {
    const auto g = graphs::theta({1.0, 1.5, 2.0});
    const auto m = build_abstract_space(g, {}, 0.2, 0.05);
    const auto sys = assemble_neumann(m);
    const MgGrid grid = matching_grid(m);
    const auto mg = assemble_kirchhoff_laplacian(grid);
    const auto J = build_J0(grid, mg.M, m, sys.M);
    Lcg rng(4);
    const Vec f = rng.vector(grid.num_function_dofs());
    const Vec u = rng.vector(sys.dim());
    CHECK(m_dot(sys.M, J.apply(f), u) == doctest::Approx(m_dot(mg.M, f, J.adjoint(u))).epsilon(1e-12));
    const auto s = interpolate(grid, [&](int e, double x) { return std::sin(pi * x / g.edge(e).length); });
    const Vec back = J.adjoint(J.apply(s.dofs));
    CHECK(m_norm(mg.M, back - s.dofs) / m_norm(mg.M, s.dofs) < 1e-10);
  }

  TEST_CASE("embedded mesh is rejected by J0") {
    const auto g = graphs::single_edge(1.0, true);
    const auto m = build_embedded_space(g, {}, 0.2, 0.25, 0.05);
    const auto sys = assemble_neumann(m);
    const MgGrid grid = matching_grid(m);
    const auto mg = assemble_kirchhoff_laplacian(grid);
    CHECK_THROWS_AS(build_J0(grid, mg.M, m, sys.M), Error);
  }

  TEST_CASE("identity map between identical systems has zero defects") {
    const auto g = graphs::single_edge(1.0);
    const auto op = assemble_kirchhoff_laplacian(g, 0.05);
    SpMat I(op.dim(), op.dim());
    I.setIdentity();
    const IdentificationMap J(I, op.M, op.M);
    const auto d = defect_norms_laplacian(op, op, J);
    CHECK(d.d1 < 1e-10);
    CHECK(d.d2 < 1e-10);
    CHECK(d.d3 < 1e-10);
  }

  TEST_CASE("operator norm uses the weighted inner product") {
    Vec w(3);
    w << 1.0, 4.0, 9.0;
    SpMat M(3, 3), I(3, 3);
    for (int i = 0; i < 3; ++i) M.insert(i, i) = w[i];
    I.setIdentity();
    // A = diag(1, 1, 2) is M-self-adjoint with norm 2 in any diagonal weight
    auto A = [](const Vec& x) -> Vec { return Vec(x.array() * Eigen::Array3d(1, 1, 2)); };
    CHECK(operator_norm(A, A, M).value == doctest::Approx(2.0).epsilon(1e-4));
    // B maps e0 to e2; its M-adjoint differs from the Euclidean transpose
    auto B = [](const Vec& x) -> Vec { return Vec(Eigen::Vector3d(0, 0, x[0])); };
    auto Bm = [&](const Vec& y) -> Vec { return Vec(Eigen::Vector3d(w[2] / w[0] * y[2], 0, 0)); };
    auto Bt = [](const Vec& y) -> Vec { return Vec(Eigen::Vector3d(y[2], 0, 0)); };
    CHECK(operator_norm(B, Bm, M).value == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(operator_norm(B, Bt, I).value == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("Hausdorff distance of resolvent images") {
    CHECK(hausdorff_resolvent_distance({0.0, 1.0}, {0.0, 2.0}, 2.0).distance == doctest::Approx(1.0 / 6));
    CHECK(hausdorff_resolvent_distance({0.0, 1.0}, {0.0, 1.0}, 5.0).distance == 0.0);
    CHECK(hausdorff_resolvent_distance({0.0, 1.0}, {0.0, 1.0}, 5.0).truncation == doctest::Approx(1.0 / 6));
    CHECK_THROWS_AS(hausdorff_resolvent_distance({3.0}, {4.0}, 1.0), Error);
  }

  TEST_CASE("embedded defects equal eps tau") {
    const auto g = graphs::single_edge(1.0, true);
    const double eps = 0.2, tau = 0.25;
    const auto T = embedded_default_templates(g, tau);
    const auto a = build_abstract_space(g, T, eps, 0.05);
    const auto b = build_embedded_space(g, T, eps, tau, 0.05);
    const auto d = embedded_defects(a, assemble_neumann(a), b, assemble_neumann(b));
    CHECK(d.one_minus_jstar_j == doctest::Approx(eps * tau).epsilon(1e-3));
    CHECK(d.one_minus_j_jstar == doctest::Approx(eps * tau).epsilon(1e-3));
  }
}
