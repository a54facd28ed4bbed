#include "qglab/graphlike_mesh.hpp"

#include <doctest.h>

#include <sstream>

using namespace qg;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("graphlike_mesh") {
  TEST_CASE("tube and vertex areas") {
    const auto g = graphs::star({1.0, 1.0, 1.0});
    const double eps = 0.2;
    const auto m = build_abstract_space(g, {}, eps, 0.05);
    for (int e = 0; e < 3; ++e) CHECK(m.area(m.select_edge(e)) == doctest::Approx(eps * 1.0).epsilon(1e-12));
    const auto tmpl = default_templates(g);
    for (int v = 0; v < g.num_vertices(); ++v) {
      const double exact = eps * eps * TemplateGeometry(tmpl.at(v)).area();
      CHECK(m.area(m.select_vertex(v)) == doctest::Approx(exact).epsilon(1e-2));
    }
    CHECK(m.min_angle_deg() >= 20.0);
  }

  TEST_CASE("regions partition the triangles") {
    const auto g = graphs::theta({1.0, 1.5, 2.0});
    const auto m = build_abstract_space(g, {}, 0.2, 0.05);
    std::vector<int> count(m.triangles.size(), 0);
    for (int v = 0; v < g.num_vertices(); ++v) {
      const auto s = m.select_vertex(v);
      for (std::size_t t = 0; t < s.size(); ++t) count[t] += s[t];
    }
    for (int e = 0; e < g.num_edges(); ++e) {
      const auto s = m.select_edge(e);
      for (std::size_t t = 0; t < s.size(); ++t) count[t] += s[t];
    }
    for (int c : count) CHECK(c == 1);
    CHECK(m.select("edge_half:e1:a") == m.select_edge_half(1, 0));
    CHECK(kind_of([&] { m.select("edge:nope"); }) == ErrorKind::UnknownRegion);
  }

  TEST_CASE("vertex coordinates are eps times the template points") {
    const auto g = graphs::star({1.0, 1.0, 1.0});
    const auto a = build_abstract_space(g, {}, 0.2, 0.05);
    const auto b = build_abstract_space(g, {}, 0.1, 0.025);
    const auto ca = a.vertex_coordinates(0), cb = b.vertex_coordinates(0);
    REQUIRE(ca.size() == cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i) CHECK((ca[i] - 2.0 * cb[i]).norm() < 1e-14);
  }

  TEST_CASE("validation") {
    const auto g = graphs::star({1.0, 1.0, 1.0});
    CHECK(kind_of([&] { build_abstract_space(g, {}, 0.2, 0.1); }) == ErrorKind::TooCoarse);
    CHECK(kind_of([&] { build_abstract_space(g, {}, 1.5, 0.1); }) == ErrorKind::InvalidSpec);
    TemplateMap wrong{{0, templates::straight()}};
    CHECK(kind_of([&] { build_abstract_space(g, wrong, 0.2, 0.05); }) == ErrorKind::PortMismatch);
    CHECK(kind_of([&] { build_embedded_space(g, {}, 0.2, 0.25, 0.05); }) == ErrorKind::InvalidSpec);
  }

  TEST_CASE("embedded dumbbell") {
    const auto g = graphs::single_edge(1.0, true);
    const double eps = 0.2, tau = 0.25;
    const auto m = build_embedded_space(g, {}, eps, tau, 0.05);
    CHECK(m.tubes[0].longitudinal == doctest::Approx(1.0 - eps * tau));
    CHECK(m.area(m.select_edge(0)) == doctest::Approx(eps * (1.0 - eps * tau)).epsilon(1e-12));
    CHECK(m.phi(0, m.shortened_start(0)) == doctest::Approx(0.0));
    const auto a = build_abstract_space(g, embedded_default_templates(g, tau), eps, 0.05);
    CHECK(a.num_nodes == m.num_nodes);
  }

  TEST_CASE("text export") {
    const auto m = build_abstract_space(graphs::single_edge(1.0), {}, 0.4, 0.1);
    std::ostringstream out;
    m.write_text(out);
    std::istringstream in(out.str());
    std::string w1, w2;
    int n = 0, t = 0;
    in >> w1 >> n >> w2 >> t;
    CHECK(w1 == "nodes");
    CHECK(n == m.num_nodes);
    CHECK(t == static_cast<int>(m.triangles.size()));
  }
}
