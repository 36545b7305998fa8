#pragma once

// Two-cell capacity oracle: cell 0 holds the nodes with
// |X - a| - t < |X - b|, where t = w0 - w1. Bisection on t finds the smallest
// shift that gives cell 0 at least the target mass.

#include <cmath>
#include <vector>

#include "geotess/mesh.hpp"

namespace oracle {

inline double cell0_mass(const geotess::Mesh& mesh, const std::vector<double>& mass, geotess::Point2 a,
                         geotess::Point2 b, double t) {
  double m = 0.0;
  for (int i = 0; i < mesh.size(); ++i) {
    const auto& x = mesh.centroid(i);
    if (std::hypot(x.x - a.x, x.y - a.y) - t < std::hypot(x.x - b.x, x.y - b.y)) m += mass[i];
  }
  return m;
}

inline double bisect_shift(const geotess::Mesh& mesh, const std::vector<double>& mass, geotess::Point2 a,
                           geotess::Point2 b, double target, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cell0_mass(mesh, mass, a, b, mid) >= target) hi = mid;
    else lo = mid;
  }
  return hi;
}

}  // namespace oracle
