#include "qglab/delaunay.hpp"
#include "qglab/vertex_template.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qg;
using std::numbers::pi;

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

TEST_SUITE("templates") {
  TEST_CASE("Delaunay triangulation of a square with a center point") {
    mesh2d::Delaunay d(Vec2(-1, -1), Vec2(2, 2));
    for (const Vec2& p : {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1), Vec2(0.5, 0.5)}) CHECK(d.insert(p) >= 0);
    CHECK(d.insert(Vec2(0.5, 0.5)) == -1);
    CHECK(d.triangles().size() == 4);
  }

  TEST_CASE("disc template has area pi / 4") {
    const TemplateGeometry geo(templates::disc());
    CHECK(geo.area() == doctest::Approx(pi / 4).epsilon(1e-9));
    const auto tm = mesh_template(geo, 0.05, 20);
    CHECK(tm.area() == doctest::Approx(pi / 4).epsilon(5e-3));
    CHECK(tm.min_angle_deg >= 20.0);
  }

  TEST_CASE("ports get exactly port_cells subdivisions in order") {
    const TemplateGeometry geo(templates::junction(3));
    const auto tm = mesh_template(geo, 0.1, 10);
    REQUIRE(tm.port_nodes.size() == 3);
    for (int j = 0; j < 3; ++j) {
      const auto& pn = tm.port_nodes[static_cast<std::size_t>(j)];
      CHECK(pn.size() == 11);
      CHECK((tm.points[static_cast<std::size_t>(pn.front())] - geo.spec().port_start(j)).norm() < 1e-12);
      CHECK((tm.points[static_cast<std::size_t>(pn.back())] - geo.spec().port_end(j)).norm() < 1e-12);
    }
  }

  TEST_CASE("geometry validation") {
    auto t = templates::end_cap();
    t.polygon[1].y() += 0.5;  // widen the port
    CHECK(kind_of([&] { TemplateGeometry{t}; }) == ErrorKind::PortMismatch);
    auto big = templates::disc();
    big.r_round = 0.8;
    CHECK(kind_of([&] { TemplateGeometry{big}; }) == ErrorKind::TemplateOverlap);
    auto sharp = templates::disc();
    sharp.r_round = 0.0;
    CHECK(kind_of([&] { check_convexity(sharp); }) == ErrorKind::NonSmoothBoundary);
  }

  TEST_CASE("curvature of the junction") {
    const auto r = check_convexity(templates::junction(3));
    CHECK(r.kappa_minus_exact == doctest::Approx(5.0));
    CHECK(r.kappa_minus == doctest::Approx(5.0).epsilon(1e-6));
    const auto d = check_convexity(templates::disc());
    CHECK(d.kappa_minus == doctest::Approx(0.0));
  }

  TEST_CASE("collar depth of the default templates") {
    for (int deg : {1, 2, 3, 4}) {
      const TemplateGeometry geo(templates::default_for_degree(deg, 0.4));
      for (int j = 0; j < deg; ++j) CHECK(geo.collar_depth(j) >= 0.4 - 1e-9);
    }
  }

  TEST_CASE("JSON round trip") {
    const auto t = templates::junction(4);
    CHECK(to_json(template_from_json(to_json(t))) == to_json(t));
    CHECK(kind_of([] { template_from_json(nlohmann::json{{"name", "x"}}); }) == ErrorKind::InvalidSpec);
  }
}
