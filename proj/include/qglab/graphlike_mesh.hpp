#pragma once

#include "qglab/kernels.hpp"
#include "qglab/metric_graph.hpp"
#include "qglab/vertex_template.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace qg {

enum class Variant { Abstract, Embedded };

enum class RegionKind { Vertex, EdgeHalf };

/// Triangles are tagged either vertex(v) or edge_half(e, v); edge(e), star(v)
/// and all are unions of these.
struct Region {
  RegionKind kind = RegionKind::Vertex;
  int vertex = kNoVertex;
  int edge = -1;
  std::string name;
};

/// Corner coordinates are kept in an unscaled chart; the physical triangle is
/// the chart triangle stretched by (sx, sy).
struct MeshTriangle {
  std::array<int, 3> nodes{};
  std::array<Vec2, 3> chart{};
  double sx = 1.0;
  double sy = 1.0;
  int region = 0;
};

/// Structured tube grid: column i sits at s = i * length / nx on the full
/// edge, row k at y = -1/2 + k / ny in the unscaled cross-section.
struct Tube {
  int nx = 0;
  int ny = 0;
  double length = 0.0;        // full edge length
  double longitudinal = 1.0;  // 1 or 1 - eps * tau
  std::vector<int> nodes;     // (nx + 1) * (ny + 1), column-major in k
  int node(int i, int k) const { return nodes[static_cast<std::size_t>(i * (ny + 1) + k)]; }
  double s(int i) const { return length * i / nx; }
  double y(int k) const { return -0.5 + static_cast<double>(k) / ny; }
};

struct VertexPatch {
  VertexTemplate spec;
  double template_area = 0.0;
  std::vector<Vec2> points;   // unscaled template coordinates
  std::vector<int> nodes;     // template point -> mesh node
  double rotation = 0.0;      // embedded placement only
};

struct PortGlue {
  int vertex = kNoVertex;
  int edge = -1;
  int port = -1;
  std::vector<int> nodes;  // ordered like the tube rows
};

class GraphLikeMesh {
 public:
  MetricGraph graph;
  Variant variant = Variant::Abstract;
  double eps = 0.0;
  double h = 0.0;
  double tau = 0.0;
  int num_nodes = 0;
  std::vector<MeshTriangle> triangles;
  std::vector<Region> regions;
  std::vector<Tube> tubes;
  std::vector<VertexPatch> patches;
  std::vector<PortGlue> ports;
  std::vector<std::array<int, 2>> boundary_edges;
  std::vector<int> boundary_region;
  std::vector<Vec2> xy;  // plane position (exploded layout for the abstract variant)

  int vertex_region(int v) const { return v; }
  int edge_half_region(int e, int v) const;
  /// Region selection by name: all, vertex:V, edge:E, edge_half:E:V, star:V.
  std::vector<char> select(const std::string& name) const;
  std::vector<char> select_vertex(int v) const;
  std::vector<char> select_edge(int e) const;
  std::vector<char> select_edge_half(int e, int v) const;
  std::vector<char> select_star(int v) const;
  std::vector<char> select_all() const;

  std::vector<kernels::TriangleGeom> geometry() const;
  double area(const std::vector<char>& selection) const;
  double area() const { return area(select_all()); }
  double min_angle_deg() const;

  /// Embedded coordinate map from arc length on the shortened tube, measured
  /// from the initial vertex, to the full-edge coordinate.
  double phi(int e, double s_tilde) const;
  double shortened_start(int e) const { return 0.5 * eps * tau * tubes[static_cast<std::size_t>(e)].length; }

  /// eps-scaled template coordinates of the vertex region of v, in the
  /// template frame.
  std::vector<Vec2> vertex_coordinates(int v) const;

  void write_text(std::ostream& out) const;
};

/// Per-vertex templates; missing entries fall back to default_templates, or
/// to embedded_default_templates for the embedded variant.
using TemplateMap = std::map<int, VertexTemplate>;

/// Templates whose collars exceed tau * l_e + 0.05 for every incident edge.
TemplateMap default_templates(const MetricGraph& g, double tau = 0.25);
/// Fills the vertices missing from templates with default_templates.
TemplateMap complete_templates(const MetricGraph& g, const TemplateMap& templates, double tau = 0.25);

GraphLikeMesh build_abstract_space(const MetricGraph& g, const TemplateMap& templates, double eps, double h);
GraphLikeMesh build_embedded_space(const MetricGraph& g, const TemplateMap& templates, double eps, double tau,
                                   double h);

/// Default embedded templates: end caps, straight channels and junctions whose
/// ports sit at distance tau * l_e / 2 from the vertex.
TemplateMap embedded_default_templates(const MetricGraph& g, double tau);

/// Mesh size rule used by the harness.
double default_mesh_size(double eps);

}  // namespace qg
