#pragma once

#include <span>
#include <vector>

#include "geotess/geometry.hpp"
#include "geotess/locator.hpp"

namespace geotess {

/// Delaunay triangulation of a planar point cloud (incremental Bowyer-Watson).
/// Returns counter-clockwise triangles over indices into `points`. Exact
/// duplicates are skipped. Insertion order is deterministic.
std::vector<Triangle> delaunay_triangulation(std::span<const Point2> points);

}  // namespace geotess
