#include "geotess/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "geotess/errors.hpp"
#include "geotess/expr.hpp"

namespace geotess {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double lp_norm(const Point2& v, double s) {
  const double ax = std::abs(v.x), ay = std::abs(v.y);
  if (s == 1.0) return ax + ay;
  if (std::isinf(s)) return std::max(ax, ay);
  if (s == 2.0) return std::hypot(ax, ay);
  const double m = std::max(ax, ay);
  if (m == 0.0) return 0.0;
  return m * std::pow(std::pow(ax / m, s) + std::pow(ay / m, s), 1.0 / s);
}

double conjugate_exponent(double s) {
  if (s == 1.0) return kInf;
  if (std::isinf(s)) return 1.0;
  return s / (s - 1.0);
}

Point2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Gauge of the convex hull of the members' sets via its polar representation,
// sup_{|p|=1} p.v / H(p), by dense angular sampling plus golden refinement.
double numeric_gauge(const MetricSpec& metric, const Point2& x, const Point2& v) {
  if (v.x == 0.0 && v.y == 0.0) return 0.0;
  constexpr int kSamples = 720;
  auto ratio = [&](double th) {
    const Point2 p = unit(th);
    return dot(p, v) / hamiltonian(metric, x, p);
  };
  int best = 0;
  double best_val = -kInf;
  for (int k = 0; k < kSamples; ++k) {
    const double r = ratio(2.0 * std::numbers::pi * k / kSamples);
    if (r > best_val) {
      best_val = r;
      best = k;
    }
  }
  const double step = 2.0 * std::numbers::pi / kSamples;
  double a = (best - 1) * step, b = (best + 1) * step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = ratio(c), fd = ratio(d);
  for (int it = 0; it < 40; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = ratio(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = ratio(d);
    }
  }
  return std::max({best_val, fc, fd});
}

}  // namespace

ScalarField ScalarField::constant(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return {[v](const Point2&) { return v; }, os.str()};
}

ScalarField ScalarField::expression(const std::string& src) {
  Expression e(src);
  return {[e](const Point2& p) { return e(p); }, src};
}

MatrixField MatrixField::constant(const Sym2& a) {
  std::ostringstream os;
  os.precision(17);
  os << a.xx << ", " << a.xy << ", " << a.yy;
  return {[a](const Point2&) { return a; }, os.str()};
}

MatrixField MatrixField::expression(const std::string& src) {
  // Split at top-level commas.
  std::vector<std::string> parts(1);
  int depth = 0;
  for (char c : src) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.emplace_back();
      continue;
    }
    parts.back() += c;
  }
  if (parts.size() != 3) throw InvalidArgument("matrix field needs 'xx, xy, yy' expressions: " + src);
  Expression xx(parts[0]), xy(parts[1]), yy(parts[2]);
  return {[xx, xy, yy](const Point2& p) { return Sym2{xx(p), xy(p), yy(p)}; }, src};
}

MetricSpec MetricSpec::euclidean() { return MetricSpec(Euclidean{}, 1.0); }

MetricSpec MetricSpec::isotropic(ScalarField a, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("isotropic metric needs delta > 0");
  return MetricSpec(Isotropic{std::move(a)}, delta);
}

MetricSpec MetricSpec::minkowski(double s) {
  if (!(s >= 1.0)) throw InvalidArgument("minkowski exponent must satisfy s >= 1");
  // The l_s unit ball contains B(0, 2^{1/2 - 1/s}) for s <= 2 and B(0,1) otherwise.
  const double delta = s >= 2.0 ? 1.0 : std::pow(2.0, 0.5 - 1.0 / s);
  return MetricSpec(Minkowski{s}, delta);
}

MetricSpec MetricSpec::riemannian(MatrixField a, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("riemannian metric needs delta > 0");
  return MetricSpec(Riemannian{std::move(a)}, delta);
}

MetricSpec MetricSpec::max_of(std::vector<MetricSpec> members) {
  if (members.empty()) throw InvalidArgument("maxof metric needs at least one member");
  double delta = 0.0;
  for (const auto& m : members) delta = std::max(delta, m.delta());
  return MetricSpec(MaxOf{std::move(members)}, delta);
}

bool MetricSpec::is_isotropic() const {
  return std::holds_alternative<Euclidean>(variant_) || std::holds_alternative<Isotropic>(variant_);
}

std::string MetricSpec::describe() const {
  struct V {
    std::string operator()(const Euclidean&) const { return "euclidean"; }
    std::string operator()(const Isotropic& m) const { return "isotropic(a=" + m.a.source + ")"; }
    std::string operator()(const Minkowski& m) const {
      std::ostringstream os;
      os << "minkowski(s=" << (std::isinf(m.s) ? std::string("inf") : std::to_string(m.s)) << ")";
      return os.str();
    }
    std::string operator()(const Riemannian& m) const { return "riemannian(A=" + m.A.source + ")"; }
    std::string operator()(const MaxOf& m) const {
      std::string s = "maxof(";
      for (size_t i = 0; i < m.members.size(); ++i) s += (i ? "; " : "") + m.members[i].describe();
      return s + ")";
    }
  };
  return std::visit(V{}, variant_);
}

void validate_metric_at(const MetricSpec& metric, const Point2& x) {
  const double delta = metric.delta();
  if (const auto* iso = std::get_if<MetricSpec::Isotropic>(&metric.variant())) {
    const double a = iso->a(x);
    if (!(a >= delta) || !std::isfinite(a))
      throw InvalidArgument("isotropic speed a(x) = " + std::to_string(a) + " below delta at (" +
                            std::to_string(x.x) + ", " + std::to_string(x.y) + ")");
  } else if (const auto* rie = std::get_if<MetricSpec::Riemannian>(&metric.variant())) {
    const Sym2 a = rie->A(x);
    if (!(a.min_eigenvalue() >= delta * delta * (1.0 - 1e-12)) || !std::isfinite(a.xx + a.xy + a.yy))
      throw InvalidArgument("riemannian A(x) not SPD with eigenvalues >= delta^2 at (" + std::to_string(x.x) +
                            ", " + std::to_string(x.y) + ")");
  } else if (const auto* mx = std::get_if<MetricSpec::MaxOf>(&metric.variant())) {
    for (const auto& m : mx->members) validate_metric_at(m, x);
  }
}

double hamiltonian(const MetricSpec& metric, const Point2& x, const Point2& p) {
  struct V {
    const Point2& x;
    const Point2& p;
    double operator()(const MetricSpec::Euclidean&) const { return norm(p); }
    double operator()(const MetricSpec::Isotropic& m) const { return m.a(x) * norm(p); }
    double operator()(const MetricSpec::Minkowski& m) const { return lp_norm(p, conjugate_exponent(m.s)); }
    double operator()(const MetricSpec::Riemannian& m) const { return std::sqrt(std::max(0.0, m.A(x).quad(p))); }
    double operator()(const MetricSpec::MaxOf& m) const {
      double h = 0.0;
      for (const auto& member : m.members) h = std::max(h, hamiltonian(member, x, p));
      return h;
    }
  };
  return std::visit(V{x, p}, metric.variant());
}

Point2 support_point(const MetricSpec& metric, const Point2& x, const Point2& e) {
  struct V {
    const Point2& x;
    const Point2& e;
    Point2 unit_e() const {
      const double n = norm(e);
      return n > 0.0 ? e * (1.0 / n) : Point2{};
    }
    Point2 operator()(const MetricSpec::Euclidean&) const { return unit_e(); }
    Point2 operator()(const MetricSpec::Isotropic& m) const { return unit_e() * m.a(x); }
    Point2 operator()(const MetricSpec::Minkowski& m) const {
      if (m.s == 1.0) {  // diamond: vertex on the dominant axis, x first on ties
        if (std::abs(e.x) >= std::abs(e.y)) return {sgn(e.x), 0.0};
        return {0.0, sgn(e.y)};
      }
      if (std::isinf(m.s)) return {sgn(e.x), sgn(e.y)};  // square: corner, or face midpoint
      const double t = conjugate_exponent(m.s);
      const double nt = lp_norm(e, t);
      if (nt == 0.0) return {};
      return {sgn(e.x) * std::pow(std::abs(e.x) / nt, t - 1.0), sgn(e.y) * std::pow(std::abs(e.y) / nt, t - 1.0)};
    }
    Point2 operator()(const MetricSpec::Riemannian& m) const {
      const Sym2 a = m.A(x);
      const double h = std::sqrt(a.quad(e));
      return h > 0.0 ? a.apply(e) * (1.0 / h) : Point2{};
    }
    Point2 operator()(const MetricSpec::MaxOf& m) const {
      size_t best = 0;
      double best_h = -1.0;
      for (size_t k = 0; k < m.members.size(); ++k) {
        const double h = hamiltonian(m.members[k], x, e);
        if (h > best_h) {
          best_h = h;
          best = k;
        }
      }
      return support_point(m.members[best], x, e);
    }
  };
  return std::visit(V{x, e}, metric.variant());
}

double gauge(const MetricSpec& metric, const Point2& x, const Point2& v) {
  struct V {
    const MetricSpec& metric;
    const Point2& x;
    const Point2& v;
    double operator()(const MetricSpec::Euclidean&) const { return norm(v); }
    double operator()(const MetricSpec::Isotropic& m) const { return norm(v) / m.a(x); }
    double operator()(const MetricSpec::Minkowski& m) const { return lp_norm(v, m.s); }
    double operator()(const MetricSpec::Riemannian& m) const {
      return std::sqrt(std::max(0.0, m.A(x).inverse().quad(v)));
    }
    double operator()(const MetricSpec::MaxOf& m) const {
      if (m.members.size() == 1) return gauge(m.members[0], x, v);
      return numeric_gauge(metric, x, v);
    }
  };
  return std::visit(V{metric, x, v}, metric.variant());
}

Point2 boundary_point(const MetricSpec& metric, const Point2& x, double theta) {
  const Point2 e = unit(theta);
  return e * (1.0 / gauge(metric, x, e));
}

std::vector<Point2> control_boundary(const MetricSpec& metric, const Point2& x, int n) {
  if (n < 8) throw InvalidArgument("control_boundary needs at least 8 samples");
  std::vector<Point2> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) out.push_back(support_point(metric, x, unit(2.0 * std::numbers::pi * k / n)));
  return out;
}

bool check_homogeneity(const MetricSpec& metric, const Point2& x, const Point2& p, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("homogeneity check needs lambda > 0");
  const double h = hamiltonian(metric, x, p);
  const double hl = hamiltonian(metric, x, p * lambda);
  return std::abs(hl - lambda * h) <= 1e-9 * (1.0 + lambda * std::abs(h));
}

}  // namespace geotess
