#pragma once

#include <array>
#include <cmath>

namespace geotess {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2& operator+=(const Point2& o) { x += o.x; y += o.y; return *this; }
  Point2& operator-=(const Point2& o) { x -= o.x; y -= o.y; return *this; }
  Point2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend Point2 operator+(Point2 a, const Point2& b) { return a += b; }
  friend Point2 operator-(Point2 a, const Point2& b) { return a -= b; }
  friend Point2 operator*(Point2 a, double s) { return a *= s; }
  friend Point2 operator*(double s, Point2 a) { return a *= s; }
  friend Point2 operator-(const Point2& a) { return {-a.x, -a.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }

/// Twice the signed area of (a, b, c); positive for counter-clockwise order.
inline double orient2d(const Point2& a, const Point2& b, const Point2& c) {
  return cross(b - a, c - a);
}

/// Barycentric coordinates of p with respect to triangle (a, b, c).
/// Returns false for a degenerate triangle.
inline bool barycentric(const Point2& a, const Point2& b, const Point2& c, const Point2& p,
                        std::array<double, 3>& lambda) {
  const double det = orient2d(a, b, c);
  if (det == 0.0) return false;
  lambda[0] = orient2d(p, b, c) / det;
  lambda[1] = orient2d(a, p, c) / det;
  lambda[2] = 1.0 - lambda[0] - lambda[1];
  return true;
}

/// Symmetric 2x2 matrix [xx xy; xy yy].
struct Sym2 {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  double det() const { return xx * yy - xy * xy; }
  Point2 apply(const Point2& p) const { return {xx * p.x + xy * p.y, xy * p.x + yy * p.y}; }
  double quad(const Point2& p) const { return dot(p, apply(p)); }
  Sym2 inverse() const {
    const double d = det();
    return {yy / d, -xy / d, xx / d};
  }
  double min_eigenvalue() const {
    const double m = 0.5 * (xx + yy);
    const double r = std::hypot(0.5 * (xx - yy), xy);
    return m - r;
  }
};

}  // namespace geotess
