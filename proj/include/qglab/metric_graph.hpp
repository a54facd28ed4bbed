#pragma once

#include "qglab/common.hpp"

#include <json.hpp>

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qg {

inline constexpr int kNoVertex = -1;
inline constexpr double kInfiniteLength = std::numeric_limits<double>::infinity();

/// Textual description of a graph before validation. Vertex and edge names
/// are free-form; dense ids are assigned in listing order.
struct GraphSpec {
  struct Vertex {
    std::string id;
    std::optional<Vec2> xy;
  };
  struct Edge {
    std::string id;
    std::string init;
    std::string term;  // empty for a semi-infinite edge
    double length = 1.0;
  };
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
};

struct Edge {
  std::string name;
  int init = kNoVertex;
  int term = kNoVertex;  // kNoVertex marks a semi-infinite edge
  double length = 1.0;

  bool finite() const { return term != kNoVertex && std::isfinite(length); }
};

/// Validated metric graph. Immutable after construction.
///
/// Orientation of every edge is fixed by (init, term): a 1-form evaluated at
/// the initial vertex picks up a minus sign, at the terminal vertex a plus.
class MetricGraph {
 public:
  int num_vertices() const { return static_cast<int>(vertex_names_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }
  const std::string& vertex_name(int v) const { return vertex_names_.at(static_cast<std::size_t>(v)); }
  int vertex_index(const std::string& name) const;

  /// Incident edges of v sorted by edge id. An edge appears once per end at v.
  const std::vector<int>& incident(int v) const { return incident_.at(static_cast<std::size_t>(v)); }
  int degree(int v) const { return static_cast<int>(incident(v).size()); }

  /// +1 if v is the terminal vertex of e, -1 if it is the initial one.
  int orientation(int e, int v) const;

  double min_length() const { return min_length_; }
  double total_length() const;
  bool all_finite() const;
  /// Throws InfiniteEdge when a semi-infinite edge is present.
  void require_finite(std::string_view what) const;

  bool has_embedding() const { return embedding_.has_value(); }
  const std::vector<Vec2>& embedding() const { return *embedding_; }

  nlohmann::json to_json() const;

 private:
  friend MetricGraph build_graph(const GraphSpec& spec);
  std::vector<std::string> vertex_names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
  std::optional<std::vector<Vec2>> embedding_;
  double min_length_ = 0.0;
};

MetricGraph build_graph(const GraphSpec& spec);
GraphSpec graph_spec_from_json(const nlohmann::json& j);
MetricGraph load_graph(const std::string& path);

struct Betti {
  int b0 = 0;
  int b1 = 0;
};
Betti betti_numbers(const MetricGraph& g);
int euler_index(const MetricGraph& g);

namespace graphs {
MetricGraph single_edge(double length, bool embedded = false);
MetricGraph two_edge_cycle(double length);
MetricGraph star(const std::vector<double>& lengths, bool embedded = false);
MetricGraph theta(const std::vector<double>& lengths);
MetricGraph path(const std::vector<double>& lengths, bool embedded = false);
/// Connected multigraph without loops on between 2 and max_vertices vertices.
MetricGraph random_connected(std::uint64_t seed, int max_vertices);
}  // namespace graphs

}  // namespace qg
