#pragma once

#include "qglab/common.hpp"

#include <array>
#include <vector>

namespace qg::mesh2d {

double orient(const Vec2& a, const Vec2& b, const Vec2& c);
double min_angle_deg(const Vec2& a, const Vec2& b, const Vec2& c);

/// Incremental Bowyer-Watson triangulation inside a large super triangle.
/// Triangles keep edge adjacency so point location is a walk and the
/// cavity is grown from the containing triangle.
class Delaunay {
 public:
  /// All later points must lie inside [lo, hi].
  Delaunay(const Vec2& lo, const Vec2& hi);

  /// Returns the point index, or -1 when p duplicates an existing point.
  int insert(const Vec2& p);
  const std::vector<Vec2>& points() const { return pts_; }
  /// Triangles not touching the super triangle, CCW, indices into points().
  std::vector<std::array<int, 3>> triangles() const;
  static constexpr int kSuper = 3;  // points 0..2 belong to the super triangle

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // neighbour opposite v[i]
    bool alive;
  };
  int locate(const Vec2& p) const;
  bool in_circumcircle(int t, const Vec2& p) const;

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  int last_ = 0;
};

}  // namespace qg::mesh2d
