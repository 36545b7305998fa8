#pragma once

#include <array>
#include <string>
#include <vector>

#include "geotess/geometry.hpp"
#include "geotess/locator.hpp"

namespace geotess {

/// Triangulation of a bounded planar domain. Solver nodes are the triangle
/// centroids; the interpolation support is a Delaunay triangulation of those
/// centroids restricted to the meshed domain. Immutable once built.
class Mesh {
 public:
  Mesh() = default;

  /// Validates and builds derived data. Clockwise triangles are reoriented;
  /// zero-area triangles and out-of-range indices throw InvalidArgument.
  static Mesh from_triangles(std::vector<Point2> vertices, std::vector<Triangle> triangles);

  int size() const { return static_cast<int>(triangles_.size()); }
  bool empty() const { return triangles_.empty(); }

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Point2>& centroids() const { return centroids_; }
  const Point2& centroid(int i) const { return centroids_[i]; }
  const std::vector<double>& areas() const { return areas_; }
  double area(int i) const { return areas_[i]; }

  /// Edge-sharing triangles of each triangle (sorted).
  const std::vector<std::vector<int>>& tri_adjacency() const { return tri_adjacency_; }
  /// Centroid neighbours along edges of the interpolation support (sorted).
  const std::vector<std::vector<int>>& node_adjacency() const { return node_adjacency_; }

  double total_area() const { return total_area_; }
  double max_area() const { return max_area_; }
  double mean_area() const { return total_area_ / static_cast<double>(size()); }
  /// Diagonal of the vertex bounding box.
  double diameter() const { return diameter_; }
  Point2 bbox_min() const { return bbox_min_; }
  Point2 bbox_max() const { return bbox_max_; }

  /// Index of a mesh triangle containing p, or -1.
  int locate(const Point2& p) const { return tri_locator_.locate(p); }
  bool contains(const Point2& p) const { return locate(p) >= 0; }
  /// True when the segment a-b stays inside the meshed domain (sampled test).
  bool segment_inside(const Point2& a, const Point2& b, int samples = 8) const;

  /// Triangles over centroid indices used for linear interpolation of node fields.
  const std::vector<Triangle>& support_triangles() const { return support_; }
  /// Containing support triangle of p with barycentric weights, or -1.
  int locate_support(const Point2& p, std::array<double, 3>* lambda) const {
    return support_locator_.locate(p, lambda);
  }

  /// Index of the centroid closest to p; smallest index on ties.
  int nearest_node(const Point2& p) const;

 private:
  void build_derived();

  std::vector<Point2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Point2> centroids_;
  std::vector<double> areas_;
  std::vector<std::vector<int>> tri_adjacency_;
  std::vector<std::vector<int>> node_adjacency_;
  std::vector<Triangle> support_;
  TriangleLocator tri_locator_;
  TriangleLocator support_locator_;
  double total_area_ = 0.0;
  double max_area_ = 0.0;
  double diameter_ = 0.0;
  Point2 bbox_min_{};
  Point2 bbox_max_{};
};

// Generators. `max_area` bounds every triangle's area.

Mesh generate_rect_mesh(double xmin, double xmax, double ymin, double ymax, double max_area);
Mesh generate_disk_mesh(Point2 center, double radius, double max_area);

enum class CompositeDomain {
  LShape,                  ///< [0,1]^2 u [-1,0]x[-1,1]
  SquaresQuarterDiskHole,  ///< [0,1]^2 u [-1,0]^2 u (B(0,1) n [-1,0]x[0,1]) minus B((-0.4,0.4),0.2)
};

/// Parses "lshape" / "squares_quarter_disk_hole"; throws InvalidArgument otherwise.
CompositeDomain parse_composite_domain(const std::string& name);
std::string to_string(CompositeDomain d);
/// Analytic area of a composite domain.
double composite_domain_area(CompositeDomain d);
bool composite_domain_contains(CompositeDomain d, const Point2& p);
Mesh generate_composite_mesh(CompositeDomain d, double max_area);

// Text format: "geomesh v1 <nv> <nt>", nv lines "x y", nt lines "i j k".

Mesh load_mesh(const std::string& path);
Mesh parse_mesh(const std::string& text);
void save_mesh(const Mesh& mesh, const std::string& path);
std::string format_mesh(const Mesh& mesh);

}  // namespace geotess
