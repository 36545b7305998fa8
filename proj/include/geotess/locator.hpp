#pragma once

#include <array>
#include <span>
#include <vector>

#include "geotess/geometry.hpp"

namespace geotess {

using Triangle = std::array<int, 3>;

/// Uniform-grid bucket index answering "which triangle contains p".
/// Holds its own copy of the geometry so it stays valid independently of the caller.
class TriangleLocator {
 public:
  TriangleLocator() = default;
  TriangleLocator(std::span<const Point2> points, std::span<const Triangle> triangles);

  /// Index of the lowest-numbered triangle containing p (edges inclusive up to
  /// a relative tolerance), or -1. Fills barycentric weights when requested.
  int locate(const Point2& p, std::array<double, 3>* lambda = nullptr) const;

  bool empty() const { return triangles_.empty(); }

 private:
  std::vector<Point2> points_;
  std::vector<Triangle> triangles_;
  Point2 lo_{};
  double cell_ = 1.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<int> offsets_;
  std::vector<int> items_;
};

}  // namespace geotess
