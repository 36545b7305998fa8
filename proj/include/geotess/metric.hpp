#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "geotess/geometry.hpp"

namespace geotess {

/// Scalar coefficient field a(x) with a printable source for config echo.
struct ScalarField {
  std::function<double(const Point2&)> fn;
  std::string source;

  static ScalarField constant(double v);
  static ScalarField expression(const std::string& src);
  double operator()(const Point2& p) const { return fn(p); }
};

/// Symmetric matrix field A(x); `source` holds "xx, xy, yy" expressions.
struct MatrixField {
  std::function<Sym2(const Point2&)> fn;
  std::string source;

  static MatrixField constant(const Sym2& a);
  /// Three comma-separated expressions for the xx, xy and yy entries.
  static MatrixField expression(const std::string& src);
  Sym2 operator()(const Point2& p) const { return fn(p); }
};

/// Convex control-set family C(x). The Hamiltonian is its support function
/// H(x,p) = sup_{q in C(x)} p.q and the induced distance is the minimal travel
/// time with velocities in C(x).
class MetricSpec {
 public:
  struct Euclidean {};
  /// C(x) = a(x) B(0,1).
  struct Isotropic {
    ScalarField a;
  };
  /// C = { q : |q|_s <= 1 }, 1 <= s <= inf, so the distance is |x - y|_s.
  struct Minkowski {
    double s;
  };
  /// C(x) = A(x)^{1/2} B(0,1).
  struct Riemannian {
    MatrixField A;
  };
  /// Convex hull of the members' control sets: H = max of member Hamiltonians.
  struct MaxOf {
    std::vector<MetricSpec> members;
  };
  using Variant = std::variant<Euclidean, Isotropic, Minkowski, Riemannian, MaxOf>;

  MetricSpec() : variant_(Euclidean{}), delta_(1.0) {}

  static MetricSpec euclidean();
  static MetricSpec isotropic(ScalarField a, double delta);
  static MetricSpec minkowski(double s);
  static MetricSpec riemannian(MatrixField a, double delta);
  static MetricSpec max_of(std::vector<MetricSpec> members);

  const Variant& variant() const { return variant_; }
  double delta() const { return delta_; }
  /// Euclidean or isotropic: the cases a single-pass causal solver handles.
  bool is_isotropic() const;
  bool is_euclidean() const { return std::holds_alternative<Euclidean>(variant_); }
  std::string describe() const;

 private:
  MetricSpec(Variant v, double delta) : variant_(std::move(v)), delta_(delta) {}
  Variant variant_;
  double delta_;
};

/// Throws InvalidArgument if the metric violates its lower bound at x.
void validate_metric_at(const MetricSpec& metric, const Point2& x);

double hamiltonian(const MetricSpec& metric, const Point2& x, const Point2& p);

/// Maximiser of e.q over C(x) (a support point); unit-length e is not required.
Point2 support_point(const MetricSpec& metric, const Point2& x, const Point2& e);

/// Gauge of C(x): the travel time needed for displacement v at frozen x.
double gauge(const MetricSpec& metric, const Point2& x, const Point2& v);

/// Point of the boundary of C(x) in direction theta (radial parametrisation).
Point2 boundary_point(const MetricSpec& metric, const Point2& x, double theta);

/// Support points for n uniformly spaced directions theta_k = 2 pi k / n.
/// Throws InvalidArgument for n < 8.
std::vector<Point2> control_boundary(const MetricSpec& metric, const Point2& x, int n);

/// |H(x, l p) - l H(x, p)| <= 1e-9 (1 + l |H(x, p)|). Throws for l <= 0.
bool check_homogeneity(const MetricSpec& metric, const Point2& x, const Point2& p, double lambda);

}  // namespace geotess
