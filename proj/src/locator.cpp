#include "geotess/locator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geotess {

namespace {
constexpr double kBaryTol = 1e-12;
}

TriangleLocator::TriangleLocator(std::span<const Point2> points, std::span<const Triangle> triangles)
    : points_(points.begin(), points.end()), triangles_(triangles.begin(), triangles.end()) {
  if (triangles_.empty()) return;
  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
  double xmax = -xmin, ymax = -xmin;
  for (const auto& t : triangles_) {
    for (int v : t) {
      xmin = std::min(xmin, points_[v].x);
      xmax = std::max(xmax, points_[v].x);
      ymin = std::min(ymin, points_[v].y);
      ymax = std::max(ymax, points_[v].y);
    }
  }
  const double w = std::max(xmax - xmin, 1e-300);
  const double h = std::max(ymax - ymin, 1e-300);
  cell_ = std::sqrt(w * h / static_cast<double>(triangles_.size()));
  if (!(cell_ > 0.0)) cell_ = std::max(w, h);
  nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(h / cell_)));
  lo_ = {xmin, ymin};

  auto clamp_x = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - lo_.x) / cell_)), 0, nx_ - 1); };
  auto clamp_y = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - lo_.y) / cell_)), 0, ny_ - 1); };

  std::vector<int> counts(static_cast<size_t>(nx_) * ny_ + 1, 0);
  auto for_each_bucket = [&](const Triangle& t, auto&& fn) {
    double bx0 = points_[t[0]].x, bx1 = bx0, by0 = points_[t[0]].y, by1 = by0;
    for (int k = 1; k < 3; ++k) {
      bx0 = std::min(bx0, points_[t[k]].x);
      bx1 = std::max(bx1, points_[t[k]].x);
      by0 = std::min(by0, points_[t[k]].y);
      by1 = std::max(by1, points_[t[k]].y);
    }
    for (int j = clamp_y(by0); j <= clamp_y(by1); ++j)
      for (int i = clamp_x(bx0); i <= clamp_x(bx1); ++i) fn(j * nx_ + i);
  };
  for (const auto& t : triangles_) for_each_bucket(t, [&](int b) { ++counts[b + 1]; });
  for (size_t b = 1; b < counts.size(); ++b) counts[b] += counts[b - 1];
  offsets_ = counts;
  items_.resize(offsets_.back());
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (int ti = 0; ti < static_cast<int>(triangles_.size()); ++ti)
    for_each_bucket(triangles_[ti], [&](int b) { items_[fill[b]++] = ti; });
}

int TriangleLocator::locate(const Point2& p, std::array<double, 3>* lambda) const {
  if (triangles_.empty()) return -1;
  const double fx = (p.x - lo_.x) / cell_;
  const double fy = (p.y - lo_.y) / cell_;
  // Points just outside the bounding box may still lie on a boundary edge.
  if (fx < -1e-9 || fy < -1e-9 || fx > nx_ + 1e-9 || fy > ny_ + 1e-9) return -1;
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, ny_ - 1);
  const int b = j * nx_ + i;
  for (int k = offsets_[b]; k < offsets_[b + 1]; ++k) {
    const Triangle& t = triangles_[items_[k]];
    std::array<double, 3> l{};
    if (!barycentric(points_[t[0]], points_[t[1]], points_[t[2]], p, l)) continue;
    if (l[0] >= -kBaryTol && l[1] >= -kBaryTol && l[2] >= -kBaryTol) {
      if (lambda) *lambda = l;
      return items_[k];
    }
  }
  return -1;
}

}  // namespace geotess
