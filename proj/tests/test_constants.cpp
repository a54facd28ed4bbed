#include "qglab/constants.hpp"

#include <doctest.h>

#include <cmath>

using namespace qg;

TEST_SUITE("constants") {
  TEST_CASE("star constants") {
    const auto g = graphs::star({1.0, 1.0, 1.0});
    const auto r = compute_constants(g, default_templates(g));
    CHECK(r.ell0.value == doctest::Approx(1.0));
    CHECK(r.vol_cross_section.value == doctest::Approx(1.0));
    CHECK(r.lambda2_vx.value > 0.0);
    CHECK(r.min_collar_margin >= 0.0);
    CHECK(r.vertex_degree[0] == 3);
    const auto j = r.to_json();
    CHECK(j.contains("C_vx"));
    for (const auto& [key, val] : j.items()) {
      REQUIRE(val.contains("provenance"));
      CHECK(!val["provenance"].get<std::string>().empty());
    }
  }

  TEST_CASE("delta_eps is increasing and decays at least like sqrt(eps)") {
    const auto g = graphs::theta({1.0, 1.5, 2.0});
    const auto r = compute_constants(g, default_templates(g));
    double prev = 0.0;
    for (double e : {0.01, 0.05, 0.1, 0.2}) {
      const double d = delta_eps(r, e);
      CHECK(d > prev);
      prev = d;
    }
    // at least square-root decay towards zero
    CHECK(delta_eps(r, 1e-8) / 1e-4 <= delta_eps(r, 1e-2) / 0.1 * (1 + 1e-12));
    for (int v = 0; v < g.num_vertices(); ++v) CHECK(c_vx_vertex(r, v, 0.1) <= 0.1 * r.c_vx.value * (1 + 1e-12));
  }

  TEST_CASE("template eigenvalue extrapolation") {
    const auto t = template_lambda2(templates::disc());
    // unit-diameter disc: (j'_{1,1} / 0.5)^2
    const double exact = std::pow(1.841183781340659 / 0.5, 2);
    CHECK(t.value == doctest::Approx(exact).epsilon(2e-3));
    CHECK(std::abs(t.value - exact) < std::abs(t.fine - exact));
  }
}
