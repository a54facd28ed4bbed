#include "qglab/metric_graph.hpp"

#include <doctest.h>

#include <numeric>

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

GraphSpec two_vertices() {
  GraphSpec s;
  s.vertices = {{"a", std::nullopt}, {"b", std::nullopt}};
  return s;
}

}  // namespace

TEST_SUITE("metric_graph") {
  TEST_CASE("validation errors") {
    auto s = two_vertices();
    s.edges = {{"e", "a", "a", 1.0}};
    CHECK(kind_of([&] { build_graph(s); }) == ErrorKind::LoopEdge);
    s.edges = {{"e", "a", "b", 0.0}};
    CHECK(kind_of([&] { build_graph(s); }) == ErrorKind::NonPositiveLength);
    s.edges = {{"e", "a", "b", -2.0}};
    CHECK(kind_of([&] { build_graph(s); }) == ErrorKind::NonPositiveLength);
    s.edges = {{"e", "a", "zz", 1.0}};
    CHECK(kind_of([&] { build_graph(s); }) == ErrorKind::InvalidSpec);
    s.vertices.push_back({"c", std::nullopt});
    s.vertices.push_back({"d", std::nullopt});
    s.edges = {{"e", "a", "b", 1.0}, {"f", "c", "d", 1.0}};
    CHECK(kind_of([&] { build_graph(s); }) == ErrorKind::DisconnectedGraph);
    CHECK(kind_of([] { build_graph(GraphSpec{}); }) == ErrorKind::InvalidSpec);
  }

  TEST_CASE("embedding must match the edge lengths") {
    GraphSpec s;
    s.vertices = {{"a", Vec2(0, 0)}, {"b", Vec2(1, 0)}};
    s.edges = {{"e", "a", "b", 2.0}};
    CHECK(kind_of([&] { build_graph(s); }) == ErrorKind::EmbeddingLengthMismatch);
    s.edges[0].length = 1.0;
    CHECK(build_graph(s).has_embedding());
  }

  TEST_CASE("orientation and incidence") {
    const auto g = graphs::theta({1.0, 1.5, 2.0});
    CHECK(g.num_vertices() == 2);
    CHECK(g.num_edges() == 3);
    CHECK(g.degree(0) == 3);
    CHECK(g.orientation(0, g.edge(0).init) == -1);
    CHECK(g.orientation(0, g.edge(0).term) == 1);
    const auto& inc = g.incident(1);
    CHECK(std::is_sorted(inc.begin(), inc.end()));
    CHECK(g.min_length() == doctest::Approx(1.0));
    CHECK(g.total_length() == doctest::Approx(4.5));
  }

  TEST_CASE("Betti numbers and index") {
    const auto theta = graphs::theta({1.0, 1.5, 2.0});
    CHECK(betti_numbers(theta).b0 == 1);
    CHECK(betti_numbers(theta).b1 == 2);
    CHECK(euler_index(theta) == -1);
    const auto star = graphs::star({1.0, 1.0, 1.0});
    CHECK(betti_numbers(star).b1 == 0);
    CHECK(euler_index(star) == 1);
    CHECK(betti_numbers(graphs::two_edge_cycle(3.0)).b1 == 1);
  }

  TEST_CASE("semi-infinite edges are rejected by finite-only consumers") {
    GraphSpec s;
    s.vertices = {{"a", std::nullopt}};
    s.edges = {{"lead", "a", "", 1.0}};
    const auto g = build_graph(s);
    CHECK_FALSE(g.all_finite());
    CHECK(kind_of([&] { g.require_finite("test"); }) == ErrorKind::InfiniteEdge);
    CHECK(euler_index(g) == 1);
  }

  TEST_CASE("JSON round trip") {
    const auto g = graphs::theta({1.0, 1.5, 2.0});
    const auto h = build_graph(graph_spec_from_json(g.to_json()));
    CHECK(h.to_json() == g.to_json());
    CHECK(kind_of([] { graph_spec_from_json(nlohmann::json{{"vertices", 3}}); }) == ErrorKind::InvalidSpec);
    CHECK(kind_of([] { load_graph("/nonexistent/graph.json"); }) == ErrorKind::Io);
  }

  TEST_CASE("random graphs are connected and reproducible") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto g = graphs::random_connected(seed, 8);
      CHECK(g.num_vertices() >= 2);
      CHECK(g.num_vertices() <= 8);
      CHECK(g.to_json() == graphs::random_connected(seed, 8).to_json());
    }
  }
}
