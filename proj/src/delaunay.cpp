#include "geotess/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "geotess/errors.hpp"

namespace geotess {

namespace {

using Real = long double;

Real orient(const Point2& a, const Point2& b, const Point2& c) {
  return (static_cast<Real>(b.x) - a.x) * (static_cast<Real>(c.y) - a.y) -
         (static_cast<Real>(b.y) - a.y) * (static_cast<Real>(c.x) - a.x);
}

// > 0 when d lies strictly inside the circumcircle of the ccw triangle (a, b, c).
Real incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const Real adx = static_cast<Real>(a.x) - d.x, ady = static_cast<Real>(a.y) - d.y;
  const Real bdx = static_cast<Real>(b.x) - d.x, bdy = static_cast<Real>(b.y) - d.y;
  const Real cdx = static_cast<Real>(c.x) - d.x, cdy = static_cast<Real>(c.y) - d.y;
  const Real ad = adx * adx + ady * ady;
  const Real bd = bdx * bdx + bdy * bdy;
  const Real cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> n;  // n[k]: neighbour across the edge opposite v[k]
  bool alive = true;
};

class Builder {
 public:
  explicit Builder(std::span<const Point2> input) : n_input_(static_cast<int>(input.size())) {
    pts_.assign(input.begin(), input.end());
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin, xmax = -xmin, ymax = -xmin;
    for (const auto& p : pts_) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const double d = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const Point2 c{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
    const double big = 200.0 * d;
    pts_.push_back({c.x - big, c.y - big});
    pts_.push_back({c.x + big, c.y - big});
    pts_.push_back({c.x, c.y + big});
    tris_.push_back({{n_input_, n_input_ + 1, n_input_ + 2}, {-1, -1, -1}, true});
    lo_ = {xmin, ymin};
    span_ = d;
  }

  std::vector<Triangle> run() {
    std::vector<int> order(n_input_);
    std::iota(order.begin(), order.end(), 0);
    // Snake order over a coarse grid keeps point-location walks short.
    const int rows = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n_input_) / 4.0)));
    auto row_of = [&](int i) {
      return std::min(rows - 1, static_cast<int>((pts_[i].y - lo_.y) / span_ * rows));
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const int ra = row_of(a), rb = row_of(b);
      if (ra != rb) return ra < rb;
      return (ra % 2 == 0) ? pts_[a].x < pts_[b].x : pts_[a].x > pts_[b].x;
    });
    for (int i : order) insert(i);

    std::vector<Triangle> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_input_ || t.v[1] >= n_input_ || t.v[2] >= n_input_) continue;
      if (orient(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]]) <= 0) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  int find_containing(const Point2& p) const {
    int t = last_;
    if (t < 0 || !tris_[t].alive) t = first_alive();
    const size_t limit = 4 * tris_.size() + 16;
    for (size_t step = 0; step < limit; ++step) {
      const Tri& tri = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const Point2& a = pts_[tri.v[(k + 1) % 3]];
        const Point2& b = pts_[tri.v[(k + 2) % 3]];
        if (orient(a, b, p) < 0 && tri.n[k] >= 0) {
          next = tri.n[k];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // Walk failed to terminate (round-off); scan.
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      if (!tris_[i].alive) continue;
      const auto& v = tris_[i].v;
      if (orient(pts_[v[0]], pts_[v[1]], p) >= 0 && orient(pts_[v[1]], pts_[v[2]], p) >= 0 &&
          orient(pts_[v[2]], pts_[v[0]], p) >= 0)
        return i;
    }
    throw Error("delaunay: point location failed");
  }

  int first_alive() const {
    for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
      if (tris_[i].alive) return i;
    return 0;
  }

  void insert(int pi) {
    const Point2& p = pts_[pi];
    const int t0 = find_containing(p);
    for (int v : tris_[t0].v)
      if (pts_[v] == p) return;  // duplicate

    // Grow the cavity from the containing triangle.
    ++stamp_;
    mark_.resize(tris_.size(), 0);
    auto in_cavity = [&](int ti) { return mark_[ti] == stamp_; };
    std::vector<int> cavity{t0};
    mark_[t0] = stamp_;
    for (size_t q = 0; q < cavity.size(); ++q) {
      const Tri& t = tris_[cavity[q]];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.n[k];
        if (nb < 0 || in_cavity(nb)) continue;
        const auto& v = tris_[nb].v;
        // A point on the shared edge of t0 must also absorb the neighbour.
        const bool on_edge = cavity[q] == t0 &&
                             orient(pts_[t.v[(k + 1) % 3]], pts_[t.v[(k + 2) % 3]], p) <= 0;
        if (on_edge || incircle(pts_[v[0]], pts_[v[1]], pts_[v[2]], p) > 0) {
          mark_[nb] = stamp_;
          cavity.push_back(nb);
        }
      }
    }

    // Keep the cavity star-shaped with respect to p.
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t q = 0; q < cavity.size(); ++q) {
        const int ti = cavity[q];
        if (!in_cavity(ti) || ti == t0) continue;
        const Tri& t = tris_[ti];
        for (int k = 0; k < 3; ++k) {
          const int nb = t.n[k];
          if (nb >= 0 && in_cavity(nb)) continue;
          if (orient(pts_[t.v[(k + 1) % 3]], pts_[t.v[(k + 2) % 3]], p) <= 0) {
            mark_[ti] = 0;
            changed = true;
            break;
          }
        }
      }
    }
    std::erase_if(cavity, [&](int ti) { return !in_cavity(ti); });

    struct Edge {
      int a, b, outside;
    };
    std::vector<Edge> boundary;
    for (int ti : cavity) {
      const Tri& t = tris_[ti];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.n[k];
        if (nb >= 0 && in_cavity(nb)) continue;
        boundary.push_back({t.v[(k + 1) % 3], t.v[(k + 2) % 3], nb});
      }
    }
    for (int ti : cavity) tris_[ti].alive = false;

    std::unordered_map<int, int> starts_at;  // edge start vertex -> new triangle
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const auto& e : boundary) {
      const int id = static_cast<int>(tris_.size());
      tris_.push_back({{e.a, e.b, pi}, {-1, -1, e.outside}, true});
      if (e.outside >= 0) {
        Tri& o = tris_[e.outside];
        for (int k = 0; k < 3; ++k) {
          const int a = o.v[(k + 1) % 3], b = o.v[(k + 2) % 3];
          if (a == e.b && b == e.a) o.n[k] = id;
        }
      }
      starts_at[e.a] = id;
      created.push_back(id);
    }
    for (int id : created) {
      Tri& t = tris_[id];
      // Edge (b, p) is opposite a: shared with the new triangle starting at b.
      auto it = starts_at.find(t.v[1]);
      if (it != starts_at.end()) t.n[0] = it->second;
      // Edge (p, a) is opposite b: shared with the new triangle ending at a.
      for (int other : created) {
        if (tris_[other].v[1] == t.v[0]) {
          t.n[1] = other;
          break;
        }
      }
    }
    last_ = created.empty() ? last_ : created.front();
  }

  int n_input_;
  std::vector<Point2> pts_;
  std::vector<Tri> tris_;
  int last_ = 0;
  int stamp_ = 0;
  std::vector<int> mark_;
  Point2 lo_{};
  double span_ = 1.0;
};

}  // namespace

std::vector<Triangle> delaunay_triangulation(std::span<const Point2> points) {
  if (points.size() < 3) return {};
  return Builder(points).run();
}

}  // namespace geotess
