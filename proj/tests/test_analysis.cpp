#include "qglab/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qg;
using namespace qg::analysis;
using std::numbers::pi;

TEST_SUITE("analysis") {
  TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    const auto q = gauss_legendre(5, 0.0, 2.0);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], 9);
    CHECK(s == doctest::Approx(std::pow(2.0, 10) / 10).epsilon(1e-13));
  }

  TEST_CASE("Bessel derivative zeros") {
    CHECK(bessel_jprime_zero(1) == doctest::Approx(1.841183781340659).epsilon(1e-12));
    CHECK(bessel_jprime_zero(0) == doctest::Approx(3.831705970207512).epsilon(1e-12));
  }

  TEST_CASE("Gaffney identity on convex domains") {
    for (Domain d : {Domain::Disc, Domain::Rectangle}) {
      const auto r = verify_gaffney_identity(TestField{d});
      CHECK(r.pass);
      CHECK(r.residual < 1e-10);
      CHECK(r.terms.at("boundary") >= 0.0);
    }
    const auto rect = gaffney_terms(TestField{Domain::Rectangle});
    CHECK(rect.boundary == doctest::Approx(0.0));
  }

  TEST_CASE("Gaffney on the annulus") {
    const TestField f{Domain::Annulus};
    const auto t = gaffney_terms(f);
    CHECK(t.boundary_negative < 0.0);
    CHECK(verify_gaffney_identity(f).residual < 1e-10);
    const auto est = verify_gaffney_estimate(f);
    CHECK(est.pass);
    CHECK(est.residual <= 1.0);
  }

  TEST_CASE("coarse quadrature is flagged") {
    CHECK_THROWS_AS(verify_gaffney_identity(TestField{Domain::Disc, 1.0, 0.2, 3}), Error);
  }

  TEST_CASE("Kato inequality samples") {
    for (const auto& s : kato_samples()) {
      const auto r = verify_kato(s, 41, 1e-4, s.name == "constant");
      CHECK_MESSAGE(r.pass, s.name);
    }
    // fixed direction, nonnegative amplitude: equality
    FormSample ray{"ray", [](Vec2 x) { return Vec2(0.0, 2.0 + x.x()); }};
    CHECK(verify_kato(ray, 21, 1e-4, true).pass);
    // unit length everywhere: strict inequality
    CHECK_FALSE(verify_kato(qg::analysis::kato_samples()[1], 21, 1e-4, true).pass);
  }

  TEST_CASE("trace estimate on a star") {
    const auto g = graphs::star({1.0, 1.0, 1.0});
    const auto m = build_abstract_space(g, {}, 0.2, 0.05);
    const auto sys = assemble_neumann(m);
    const auto r = verify_trace_estimate(m, sys, 0, 0, 0.3, 8, 10);
    CHECK(r.pass);
    CHECK_THROWS_AS(verify_trace_estimate(m, sys, 0, 0, 0.9, 2, 2), Error);
    CHECK_THROWS_AS(verify_trace_estimate(m, sys, 0, 3, 0.3, 2, 2), Error);
  }

  TEST_CASE("supersymmetry and Euler characteristic") {
    const auto g = graphs::theta({1.0, 1.5, 2.0});
    const auto m = build_abstract_space(g, {}, 0.2, 0.05);
    CHECK(euler_characteristic(m) == g.num_vertices() - g.num_edges());
    const auto r = verify_supersymmetry(g, 0.05, 6, &m);
    CHECK(r.pass);
  }

  TEST_CASE("scaling laws") {
    for (const auto& r : verify_scaling(templates::junction(3), 0.1)) CHECK_MESSAGE(r.pass, r.name);
  }
}
