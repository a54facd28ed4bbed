#pragma once

#include "qglab/common.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <vector>

namespace qg {

/// Unscaled vertex region: a CCW polygon whose corners are rounded by
/// circular arcs of radius r_round, except at corners touching a port.
struct VertexTemplate {
  std::string name;
  std::vector<Vec2> polygon;
  std::vector<int> ports;  // polygon side i runs from corner i to corner i+1
  double r_round = 0.2;

  int num_ports() const { return static_cast<int>(ports.size()); }
  Vec2 port_start(int j) const;
  Vec2 port_end(int j) const;
  Vec2 port_midpoint(int j) const { return 0.5 * (port_start(j) + port_end(j)); }
  /// Unit outward normal of port j.
  Vec2 port_normal(int j) const;
};

/// One piece of the smooth boundary: a straight segment or a circular arc.
struct BoundaryPiece {
  bool arc = false;
  Vec2 a, b;                      // endpoints, traversed a -> b
  Vec2 center{0.0, 0.0};
  double radius = 0.0;
  double angle0 = 0.0, sweep = 0.0;  // signed sweep, > 0 for convex corners
  int port = -1;
  double length() const { return arc ? radius * std::abs(sweep) : (b - a).norm(); }
  Vec2 point(double t) const;  // t in [0, 1]
};

/// Validated template with its boundary split into pieces.
class TemplateGeometry {
 public:
  explicit TemplateGeometry(VertexTemplate t);
  const VertexTemplate& spec() const { return t_; }
  const std::vector<BoundaryPiece>& pieces() const { return pieces_; }
  double area() const { return area_; }
  /// Closed polyline with spacing at most h; port j gets exactly port_cells
  /// subdivisions. port_nodes[j][k] indexes the returned points.
  struct Sampling {
    std::vector<Vec2> points;
    std::vector<std::vector<int>> port_nodes;
  };
  Sampling sample(double h, int port_cells) const;
  /// Straight depth available behind each port before the walls turn.
  double collar_depth(int port) const;
  bool contains(const Vec2& p) const;
  double boundary_distance(const Vec2& p) const;

 private:
  VertexTemplate t_;
  std::vector<BoundaryPiece> pieces_;
  std::vector<Vec2> fine_;  // dense polyline for containment tests
  double area_ = 0.0;
};

struct ConvexityReport {
  double kappa_minus = 0.0;           // from sampled boundary
  double kappa_minus_exact = 0.0;     // from arc radii
  bool negative_only_on_template = true;
  std::vector<double> curvature;      // signed curvature per sample, > 0 convex
  std::vector<Vec2> samples;
  nlohmann::json to_json() const;
};

/// Boundary curvature from circumcircles of consecutive boundary samples.
ConvexityReport check_convexity(const VertexTemplate& t, double h = 0.005);

VertexTemplate template_from_json(const nlohmann::json& j);
nlohmann::json to_json(const VertexTemplate& t);
VertexTemplate load_template(const std::string& path);

namespace templates {
/// Degree-1 end cap; the port faces +x at distance port_offset from the origin.
VertexTemplate end_cap(double port_offset = 0.125, double depth = 0.5, double r_round = 0.2);
/// Straight channel of length 2 * half_length with ports at both ends.
VertexTemplate straight(double half_length = 0.5, double angle = 0.0);
/// Degree-d junction of unit-width arms at angles 2 pi j / d reaching
/// distance arm_length; the reentrant corners are concave arcs.
VertexTemplate junction(int degree, double arm_length = 1.0, double r_round = 0.2);
/// Rounded square of side 1 and rounding 0.5, i.e. a disc without ports.
VertexTemplate disc();
/// Arm length leaving a straight wall of length collar behind each port.
double junction_arm_length(int degree, double r_round, double collar);
/// Template for a vertex of given degree whose walls stay straight for at
/// least collar behind every port.
VertexTemplate default_for_degree(int degree, double collar = 0.3);
}  // namespace templates

}  // namespace qg

namespace qg {

/// Unscaled triangulation of a template. The first num_boundary points are
/// the boundary samples in order, so port_nodes index points directly.
struct TemplateMesh {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::vector<int>> port_nodes;
  int num_boundary = 0;
  double min_angle_deg = 0.0;
  double area() const;
};

/// Throws MeshQualityFailure when the minimum angle ends below 20 degrees
/// or the boundary is not recovered.
TemplateMesh mesh_template(const TemplateGeometry& geo, double h, int port_cells);

}  // namespace qg
