#include "geotess/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <utility>

#include "geotess/delaunay.hpp"
#include "geotess/errors.hpp"

namespace geotess {

Mesh Mesh::from_triangles(std::vector<Point2> vertices, std::vector<Triangle> triangles) {
  if (triangles.empty()) throw InvalidArgument("mesh has no triangles");
  const int nv = static_cast<int>(vertices.size());
  for (const auto& v : vertices)
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw InvalidArgument("non-finite vertex coordinate");
  for (size_t i = 0; i < triangles.size(); ++i) {
    auto& t = triangles[i];
    for (int v : t)
      if (v < 0 || v >= nv)
        throw InvalidArgument("triangle " + std::to_string(i) + " references vertex " + std::to_string(v));
    const double a = orient2d(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    if (a == 0.0 || !std::isfinite(a))
      throw InvalidArgument("triangle " + std::to_string(i) + " is degenerate");
    if (a < 0.0) std::swap(t[1], t[2]);
  }
  Mesh m;
  m.vertices_ = std::move(vertices);
  m.triangles_ = std::move(triangles);
  m.build_derived();
  return m;
}

void Mesh::build_derived() {
  const int n = size();
  centroids_.resize(n);
  areas_.resize(n);
  total_area_ = 0.0;
  max_area_ = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& t = triangles_[i];
    const Point2 &a = vertices_[t[0]], &b = vertices_[t[1]], &c = vertices_[t[2]];
    centroids_[i] = {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
    areas_[i] = 0.5 * orient2d(a, b, c);
    total_area_ += areas_[i];
    max_area_ = std::max(max_area_, areas_[i]);
  }

  bbox_min_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  bbox_max_ = -bbox_min_;
  for (const auto& t : triangles_)
    for (int v : t) {
      bbox_min_.x = std::min(bbox_min_.x, vertices_[v].x);
      bbox_min_.y = std::min(bbox_min_.y, vertices_[v].y);
      bbox_max_.x = std::max(bbox_max_.x, vertices_[v].x);
      bbox_max_.y = std::max(bbox_max_.y, vertices_[v].y);
    }
  diameter_ = distance(bbox_min_, bbox_max_);

  // Edge-sharing adjacency.
  tri_adjacency_.assign(n, {});
  std::map<std::pair<int, int>, int> edge_owner;
  for (int i = 0; i < n; ++i) {
    const auto& t = triangles_[i];
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_owner.try_emplace({a, b}, i);
      if (!inserted) {
        tri_adjacency_[i].push_back(it->second);
        tri_adjacency_[it->second].push_back(i);
      }
    }
  }
  for (auto& adj : tri_adjacency_) std::sort(adj.begin(), adj.end());

  tri_locator_ = TriangleLocator(vertices_, triangles_);

  // Centroid Delaunay, clipped to the meshed domain. A support triangle is kept
  // when its centroid and edge midpoints all lie inside some mesh triangle.
  support_.clear();
  const double area_floor = 1e-10 * mean_area();
  for (const auto& t : delaunay_triangulation(centroids_)) {
    const Point2 &a = centroids_[t[0]], &b = centroids_[t[1]], &c = centroids_[t[2]];
    if (0.5 * orient2d(a, b, c) <= area_floor) continue;
    const Point2 g = (a + b + c) * (1.0 / 3.0);
    if (!contains(g) || !contains((a + b) * 0.5) || !contains((b + c) * 0.5) || !contains((c + a) * 0.5))
      continue;
    support_.push_back(t);
  }
  support_locator_ = TriangleLocator(centroids_, support_);

  node_adjacency_.assign(n, {});
  std::set<std::pair<int, int>> edges;
  for (const auto& t : support_)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.insert({a, b});
    }
  for (auto [a, b] : edges) {
    node_adjacency_[a].push_back(b);
    node_adjacency_[b].push_back(a);
  }
  for (auto& adj : node_adjacency_) std::sort(adj.begin(), adj.end());
}

bool Mesh::segment_inside(const Point2& a, const Point2& b, int samples) const {
  for (int s = 0; s <= samples; ++s) {
    const double t = static_cast<double>(s) / samples;
    if (!contains(a + (b - a) * t)) return false;
  }
  return true;
}

int Mesh::nearest_node(const Point2& p) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    const Point2 d = centroids_[i] - p;
    const double d2 = d.x * d.x + d.y * d.y;
    if (d2 < best_d) {
      best_d = d2;
      best = i;
    }
  }
  return best;
}

}  // namespace geotess
