#pragma once

// Shortest paths on the triangle-centroid graph. Two centroids are joined
// when their triangles share a vertex and the chord between them stays in
// the mesh; the edge weight is the metric length of the chord, supplied by
// the caller. Independent of the eikonal solver.

#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "geotess/mesh.hpp"

namespace oracle {

using geotess::Mesh;
using geotess::Point2;

inline std::vector<std::vector<int>> vertex_neighbours(const Mesh& mesh) {
  std::vector<std::vector<int>> by_vertex(mesh.vertices().size());
  for (int t = 0; t < mesh.size(); ++t)
    for (int v : mesh.triangles()[t]) by_vertex[v].push_back(t);
  std::vector<std::set<int>> sets(mesh.size());
  for (const auto& ts : by_vertex)
    for (int a : ts)
      for (int b : ts)
        if (a != b) sets[a].insert(b);
  std::vector<std::vector<int>> out(mesh.size());
  for (int t = 0; t < mesh.size(); ++t) out[t].assign(sets[t].begin(), sets[t].end());
  return out;
}

inline bool chord_inside(const Mesh& mesh, const Point2& a, const Point2& b) {
  for (int s = 1; s < 16; ++s) {
    const double t = s / 16.0;
    if (!mesh.contains({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)})) return false;
  }
  return true;
}

inline std::vector<double> dijkstra(const Mesh& mesh, int source,
                                    const std::function<double(const Point2&, const Point2&)>& length) {
  const auto nb = vertex_neighbours(mesh);
  std::vector<double> d(mesh.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  d[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (du > d[u]) continue;
    for (int v : nb[u]) {
      const Point2 &a = mesh.centroid(u), &b = mesh.centroid(v);
      if (!chord_inside(mesh, a, b)) continue;
      const double nd = du + length(a, b);
      if (nd < d[v]) {
        d[v] = nd;
        pq.push({nd, v});
      }
    }
  }
  return d;
}

}  // namespace oracle
