#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "geotess/errors.hpp"
#include "geotess/mesh.hpp"

namespace geotess {

namespace {

// Structured nx-by-ny grid over a rectangle; the diagonal alternates with cell
// parity so the triangulation is symmetric under reflection about grid lines.
struct Grid {
  double x0, y0, dx, dy;
  int nx, ny;

  int vid(int i, int j) const { return j * (nx + 1) + i; }

  std::vector<Point2> vertices() const {
    std::vector<Point2> v;
    v.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) v.push_back({x0 + i * dx, y0 + j * dy});
    return v;
  }

  template <class Keep>
  std::vector<Triangle> triangles(const std::vector<Point2>& v, Keep&& keep) const {
    std::vector<Triangle> out;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
        std::array<Triangle, 2> pair;
        if ((i + j) % 2 == 0) {
          pair = {Triangle{a, b, c}, Triangle{a, c, d}};
        } else {
          pair = {Triangle{a, b, d}, Triangle{b, c, d}};
        }
        for (const auto& t : pair) {
          const Point2 g = (v[t[0]] + v[t[1]] + v[t[2]]) * (1.0 / 3.0);
          if (keep(g)) out.push_back(t);
        }
      }
    return out;
  }
};

int cells_for(double length, double max_area) {
  // Cell area dx*dy <= 2*max_area keeps both halves under max_area.
  return std::max(1, static_cast<int>(std::ceil(length / std::sqrt(2.0 * max_area) - 1e-12)));
}

// Drops vertices no triangle references and renumbers.
Mesh compact(std::vector<Point2> vertices, std::vector<Triangle> triangles) {
  std::vector<int> remap(vertices.size(), -1);
  std::vector<Point2> used;
  for (auto& t : triangles)
    for (int& v : t) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(used.size());
        used.push_back(vertices[v]);
      }
      v = remap[v];
    }
  return Mesh::from_triangles(std::move(used), std::move(triangles));
}

}  // namespace

Mesh generate_rect_mesh(double xmin, double xmax, double ymin, double ymax, double max_area) {
  if (!(xmax > xmin) || !(ymax > ymin)) throw InvalidArgument("rectangle must have positive extent");
  if (!(max_area > 0.0)) throw InvalidArgument("max_area must be positive");
  Grid g{xmin, ymin, 0, 0, cells_for(xmax - xmin, max_area), cells_for(ymax - ymin, max_area)};
  // Grow the grid until the floating-point triangle areas honour the bound.
  for (;;) {
    g.dx = (xmax - xmin) / g.nx;
    g.dy = (ymax - ymin) / g.ny;
    if (0.5 * g.dx * g.dy <= max_area) break;
    if (g.dx >= g.dy) ++g.nx; else ++g.ny;
  }
  auto v = g.vertices();
  // Pin the far edges to the exact bounds.
  for (int j = 0; j <= g.ny; ++j) v[g.vid(g.nx, j)].x = xmax;
  for (int i = 0; i <= g.nx; ++i) v[g.vid(i, g.ny)].y = ymax;
  auto t = g.triangles(v, [](const Point2&) { return true; });
  return Mesh::from_triangles(std::move(v), std::move(t));
}

Mesh generate_disk_mesh(Point2 center, double radius, double max_area) {
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  if (!(max_area > 0.0)) throw InvalidArgument("max_area must be positive");
  // Concentric rings with 6j vertices on ring j; each annulus splits into
  // 6(2j-1) triangles of roughly equal area pi r^2 / (6 J^2).
  int rings = std::max(1, static_cast<int>(std::ceil(
                              std::sqrt(std::numbers::pi * radius * radius / (6.0 * max_area)))));
  for (;;) {
    std::vector<Point2> v{center};
    std::vector<int> ring_start{0};
    for (int j = 1; j <= rings; ++j) {
      ring_start.push_back(static_cast<int>(v.size()));
      const int n = 6 * j;
      const double r = radius * j / rings;
      // Alternate a half-step phase to avoid radial alignment of the edges.
      const double phase = (j % 2 == 0) ? std::numbers::pi / n : 0.0;
      for (int k = 0; k < n; ++k) {
        const double th = phase + 2.0 * std::numbers::pi * k / n;
        v.push_back({center.x + r * std::cos(th), center.y + r * std::sin(th)});
      }
    }
    std::vector<Triangle> t;
    for (int k = 0; k < 6; ++k) t.push_back({0, 1 + k, 1 + (k + 1) % 6});
    for (int j = 2; j <= rings; ++j) {
      const int ni = 6 * (j - 1), no = 6 * j;
      const int si = ring_start[j - 1], so = ring_start[j];
      const double pi_ = (j - 1) % 2 == 0 ? std::numbers::pi / ni : 0.0;
      const double po = j % 2 == 0 ? std::numbers::pi / no : 0.0;
      auto ang_in = [&](int k) { return pi_ + 2.0 * std::numbers::pi * k / ni; };
      auto ang_out = [&](int k) { return po + 2.0 * std::numbers::pi * k / no; };
      // Merge the two angular sequences, advancing whichever is behind.
      int a = 0, b = 0;
      while (a < ni || b < no) {
        const bool advance_outer = b < no && (a >= ni || ang_out(b + 1) <= ang_in(a + 1));
        if (advance_outer) {
          t.push_back({si + a % ni, so + b % no, so + (b + 1) % no});
          ++b;
        } else {
          t.push_back({si + a % ni, so + b % no, si + (a + 1) % ni});
          ++a;
        }
      }
    }
    Mesh m = Mesh::from_triangles(std::move(v), std::move(t));
    if (m.max_area() <= max_area) return m;
    ++rings;
  }
}

CompositeDomain parse_composite_domain(const std::string& name) {
  if (name == "lshape" || name == "l-shape") return CompositeDomain::LShape;
  if (name == "squares_quarter_disk_hole" || name == "test2") return CompositeDomain::SquaresQuarterDiskHole;
  throw InvalidArgument("unknown composite domain '" + name + "'");
}

std::string to_string(CompositeDomain d) {
  switch (d) {
    case CompositeDomain::LShape: return "lshape";
    case CompositeDomain::SquaresQuarterDiskHole: return "squares_quarter_disk_hole";
  }
  return "?";
}

double composite_domain_area(CompositeDomain d) {
  switch (d) {
    case CompositeDomain::LShape: return 3.0;
    case CompositeDomain::SquaresQuarterDiskHole:
      return 2.0 + std::numbers::pi / 4.0 - std::numbers::pi * 0.2 * 0.2;
  }
  return 0.0;
}

bool composite_domain_contains(CompositeDomain d, const Point2& p) {
  auto in_box = [&](double x0, double x1, double y0, double y1) {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  };
  switch (d) {
    case CompositeDomain::LShape:
      return in_box(0, 1, 0, 1) || in_box(-1, 0, -1, 1);
    case CompositeDomain::SquaresQuarterDiskHole: {
      const bool base = in_box(0, 1, 0, 1) || in_box(-1, 0, -1, 0) ||
                        (in_box(-1, 0, 0, 1) && p.x * p.x + p.y * p.y <= 1.0);
      const Point2 hole{-0.4, 0.4};
      return base && distance(p, hole) > 0.2;
    }
  }
  return false;
}

Mesh generate_composite_mesh(CompositeDomain d, double max_area) {
  if (!(max_area > 0.0)) throw InvalidArgument("max_area must be positive");
  // Both built-in domains live in [-1,1]^2 with x=0 and y=0 as grid lines.
  const int per_unit = cells_for(1.0, max_area);
  Grid g{-1.0, -1.0, 1.0 / per_unit, 1.0 / per_unit, 2 * per_unit, 2 * per_unit};
  auto v = g.vertices();
  for (auto& p : v) {  // snap round-off so axis lines are exact
    p.x = std::round(p.x * per_unit) / per_unit;
    p.y = std::round(p.y * per_unit) / per_unit;
  }
  auto t = g.triangles(v, [&](const Point2& c) { return composite_domain_contains(d, c); });
  if (t.empty()) throw InvalidArgument("composite domain produced an empty mesh");
  return compact(std::move(v), std::move(t));
}

}  // namespace geotess
