#include "qglab/metric_graph.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace qg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::LoopEdge: return "LoopEdge";
    case ErrorKind::NonPositiveLength: return "NonPositiveLength";
    case ErrorKind::EmbeddingLengthMismatch: return "EmbeddingLengthMismatch";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InfiniteEdge: return "InfiniteEdge";
    case ErrorKind::TooCoarse: return "TooCoarse";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::RootBracketingFailure: return "RootBracketingFailure";
    case ErrorKind::PortMismatch: return "PortMismatch";
    case ErrorKind::TemplateOverlap: return "TemplateOverlap";
    case ErrorKind::MeshQualityFailure: return "MeshQualityFailure";
    case ErrorKind::SelfIntersection: return "SelfIntersection";
    case ErrorKind::NonSmoothBoundary: return "NonSmoothBoundary";
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::FactorizationFailure: return "FactorizationFailure";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::UnknownRegion: return "UnknownRegion";
    case ErrorKind::VariantMismatch: return "VariantMismatch";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::EmptySpectrum: return "EmptySpectrum";
    case ErrorKind::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorKind::CollarTooShallow: return "CollarTooShallow";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

int MetricGraph::vertex_index(const std::string& name) const {
  auto it = std::find(vertex_names_.begin(), vertex_names_.end(), name);
  if (it == vertex_names_.end()) throw Error(ErrorKind::InvalidSpec, "unknown vertex '" + name + "'");
  return static_cast<int>(it - vertex_names_.begin());
}

int MetricGraph::orientation(int e, int v) const {
  const Edge& ed = edge(e);
  if (ed.term == v) return +1;
  if (ed.init == v) return -1;
  return 0;
}

double MetricGraph::total_length() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.length;
  return s;
}

bool MetricGraph::all_finite() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.finite(); });
}

void MetricGraph::require_finite(std::string_view what) const {
  if (!all_finite())
    throw Error(ErrorKind::InfiniteEdge, std::string(what) + " needs a graph with finite edges only");
}

nlohmann::json MetricGraph::to_json() const {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (int v = 0; v < num_vertices(); ++v) {
    nlohmann::json jv{{"id", vertex_names_[v]}};
    if (embedding_) jv["xy"] = {(*embedding_)[v].x(), (*embedding_)[v].y()};
    j["vertices"].push_back(jv);
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : edges_) {
    nlohmann::json je{{"id", e.name}, {"init", vertex_names_[e.init]}};
    if (e.finite()) {
      je["term"] = vertex_names_[e.term];
      je["length"] = e.length;
    } else {
      je["term"] = nullptr;
      je["length"] = "inf";
    }
    j["edges"].push_back(je);
  }
  return j;
}

MetricGraph build_graph(const GraphSpec& spec) {
  if (spec.vertices.empty()) throw Error(ErrorKind::InvalidSpec, "graph has no vertices");
  MetricGraph g;
  std::unordered_map<std::string, int> index;
  bool any_xy = false, all_xy = true;
  for (const auto& v : spec.vertices) {
    if (!index.emplace(v.id, static_cast<int>(g.vertex_names_.size())).second)
      throw Error(ErrorKind::InvalidSpec, "duplicate vertex id '" + v.id + "'");
    g.vertex_names_.push_back(v.id);
    any_xy |= v.xy.has_value();
    all_xy &= v.xy.has_value();
  }
  if (any_xy && !all_xy) throw Error(ErrorKind::InvalidSpec, "embedding given for some vertices only");
  auto lookup = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw Error(ErrorKind::InvalidSpec, "edge references unknown vertex '" + name + "'");
    return it->second;
  };

  g.incident_.assign(spec.vertices.size(), {});
  g.min_length_ = kInfiniteLength;
  for (const auto& se : spec.edges) {
    Edge e;
    e.name = se.id;
    e.init = lookup(se.init);
    if (se.term.empty()) {
      e.term = kNoVertex;
      e.length = kInfiniteLength;
    } else {
      e.term = lookup(se.term);
      e.length = se.length;
      if (e.init == e.term) throw Error(ErrorKind::LoopEdge, "edge '" + se.id + "' starts and ends at the same vertex");
    }
    if (!(e.length > 0.0) || std::isnan(e.length))
      throw Error(ErrorKind::NonPositiveLength, "edge '" + se.id + "' has non-positive length");
    const int id = static_cast<int>(g.edges_.size());
    g.incident_[e.init].push_back(id);
    if (e.term != kNoVertex) g.incident_[e.term].push_back(id);
    g.min_length_ = std::min(g.min_length_, e.length);
    g.edges_.push_back(e);
  }

  for (int v = 0; v < g.num_vertices(); ++v)
    if (g.incident_[v].empty() && g.num_vertices() > 1)
      throw Error(ErrorKind::DisconnectedGraph, "vertex '" + g.vertex_names_[v] + "' is isolated");

  // union-find connectivity
  std::vector<int> parent(spec.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges_)
    if (e.term != kNoVertex) parent[find(e.init)] = find(e.term);
  for (int v = 1; v < g.num_vertices(); ++v)
    if (find(v) != find(0)) throw Error(ErrorKind::DisconnectedGraph, "graph is not connected");

  if (all_xy) {
    std::vector<Vec2> xy;
    for (const auto& v : spec.vertices) xy.push_back(*v.xy);
    for (const auto& e : g.edges_) {
      if (!e.finite()) continue;
      const double d = (xy[e.term] - xy[e.init]).norm();
      if (std::abs(d - e.length) > 1e-9 * std::max(1.0, e.length))
        throw Error(ErrorKind::EmbeddingLengthMismatch,
                    "edge '" + e.name + "' has length " + std::to_string(e.length) + " but embedded distance " +
                        std::to_string(d));
    }
    g.embedding_ = std::move(xy);
  }
  return g;
}

namespace {
std::string id_string(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw Error(ErrorKind::InvalidSpec, "ids must be strings or integers");
}
}  // namespace

GraphSpec graph_spec_from_json(const nlohmann::json& j) {
  GraphSpec spec;
  try {
    for (const auto& jv : j.at("vertices")) {
      GraphSpec::Vertex v;
      v.id = id_string(jv.at("id"));
      if (jv.contains("xy") && !jv["xy"].is_null()) v.xy = Vec2(jv["xy"].at(0).get<double>(), jv["xy"].at(1).get<double>());
      spec.vertices.push_back(v);
    }
    for (const auto& je : j.at("edges")) {
      GraphSpec::Edge e;
      e.id = id_string(je.at("id"));
      e.init = id_string(je.at("init"));
      const auto& len = je.at("length");
      if (je.at("term").is_null() || (len.is_string() && len.get<std::string>() == "inf")) {
        e.term.clear();
        e.length = kInfiniteLength;
      } else {
        e.term = id_string(je.at("term"));
        e.length = len.get<double>();
      }
      spec.edges.push_back(e);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::InvalidSpec, ex.what());
  }
  return spec;
}

MetricGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::InvalidSpec, path + ": " + ex.what());
  }
  return build_graph(graph_spec_from_json(j));
}

Betti betti_numbers(const MetricGraph& g) {
  int finite_edges = 0;
  for (const auto& e : g.edges()) finite_edges += e.finite() ? 1 : 0;
  return {1, finite_edges - g.num_vertices() + 1};
}

int euler_index(const MetricGraph& g) {
  int finite_edges = 0;
  for (const auto& e : g.edges()) finite_edges += e.finite() ? 1 : 0;
  return g.num_vertices() - finite_edges;
}

namespace graphs {

namespace {
std::string name(const char* prefix, std::size_t i) { return prefix + std::to_string(i); }
}  // namespace

MetricGraph single_edge(double length, bool embedded) {
  GraphSpec s;
  s.vertices = {{"v0", std::nullopt}, {"v1", std::nullopt}};
  if (embedded) {
    s.vertices[0].xy = Vec2(0.0, 0.0);
    s.vertices[1].xy = Vec2(length, 0.0);
  }
  s.edges = {{"e0", "v0", "v1", length}};
  return build_graph(s);
}

MetricGraph two_edge_cycle(double length) {
  GraphSpec s;
  s.vertices = {{"v0", std::nullopt}, {"v1", std::nullopt}};
  s.edges = {{"e0", "v0", "v1", length}, {"e1", "v1", "v0", length}};
  return build_graph(s);
}

MetricGraph star(const std::vector<double>& lengths, bool embedded) {
  GraphSpec s;
  s.vertices.push_back({"c", embedded ? std::optional<Vec2>(Vec2::Zero()) : std::nullopt});
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    std::optional<Vec2> xy;
    if (embedded) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(lengths.size());
      xy = Vec2(lengths[i] * std::cos(a), lengths[i] * std::sin(a));
    }
    s.vertices.push_back({name("l", i), xy});
    s.edges.push_back({name("e", i), "c", name("l", i), lengths[i]});
  }
  return build_graph(s);
}

MetricGraph theta(const std::vector<double>& lengths) {
  GraphSpec s;
  s.vertices = {{"a", std::nullopt}, {"b", std::nullopt}};
  for (std::size_t i = 0; i < lengths.size(); ++i) s.edges.push_back({name("e", i), "a", "b", lengths[i]});
  return build_graph(s);
}

MetricGraph path(const std::vector<double>& lengths, bool embedded) {
  GraphSpec s;
  double x = 0.0;
  for (std::size_t i = 0; i <= lengths.size(); ++i) {
    s.vertices.push_back({name("v", i), embedded ? std::optional<Vec2>(Vec2(x, 0.0)) : std::nullopt});
    if (i < lengths.size()) {
      s.edges.push_back({name("e", i), name("v", i), name("v", i + 1), lengths[i]});
      x += lengths[i];
    }
  }
  return build_graph(s);
}

MetricGraph random_connected(std::uint64_t seed, int max_vertices) {
  Lcg rng(seed);
  const int n = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(std::max(1, max_vertices - 1)));
  GraphSpec s;
  for (int v = 0; v < n; ++v) s.vertices.push_back({name("v", static_cast<std::size_t>(v)), std::nullopt});
  auto length = [&] { return 0.5 + 1.5 * rng.uniform(); };
  std::size_t ne = 0;
  // random spanning tree, then extra edges (parallel edges allowed)
  for (int v = 1; v < n; ++v) {
    const int u = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(v));
    s.edges.push_back({name("e", ne++), name("v", static_cast<std::size_t>(u)), name("v", static_cast<std::size_t>(v)), length()});
  }
  const int extra = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n + 1));
  for (int k = 0; k < extra; ++k) {
    const int a = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    int b = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
    if (b >= a) ++b;
    s.edges.push_back({name("e", ne++), name("v", static_cast<std::size_t>(a)), name("v", static_cast<std::size_t>(b)), length()});
  }
  return build_graph(s);
}

}  // namespace graphs
}  // namespace qg
