#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "geotess/errors.hpp"
#include "geotess/power.hpp"
#include "oracles/bisection.hpp"

using namespace geotess;

namespace {

struct Setup {
  Mesh mesh;
  DensityField density;
  std::vector<DistanceField> base;
};

Setup make(const std::vector<Point2>& mu, double max_area = 0.004) {
  Setup s;
  s.mesh = generate_rect_mesh(0, 1, 0, 1, max_area);
  s.density = build_density(s.mesh, DensitySpec::uniform());
  const EikonalSolver solver(s.mesh, MetricSpec::euclidean());
  for (const auto& p : mu) s.base.push_back(solver.solve_from_point(p, SolverKind::FastMarching));
  return s;
}

std::vector<double> masses(const Setup& s) {
  std::vector<double> m(s.mesh.size());
  for (int i = 0; i < s.mesh.size(); ++i) m[i] = node_mass(s.mesh, s.density, i);
  return m;
}

double gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) g = std::max(g, std::abs(a[k] - b[k]));
  return g;
}

}  // namespace

TEST_CASE("power: shift_fields is exact and w = 0 is the identity") {
  const Setup s = make({{0.3, 0.5}, {0.7, 0.5}});
  const std::vector<double> zero = {0.0, 0.0};
  const auto same = shift_fields(s.base, zero);
  for (int k = 0; k < 2; ++k) CHECK(same[k].values == s.base[k].values);
  const std::vector<double> w = {0.25, -0.1};
  const auto sh = shift_fields(s.base, w);
  for (int k = 0; k < 2; ++k) {
    CHECK(sh[k].source_value == s.base[k].source_value - w[k]);
    for (int i = 0; i < s.mesh.size(); ++i) CHECK(sh[k].values[i] == s.base[k].values[i] - w[k]);
  }
}

TEST_CASE("power: equal weights give the Voronoi assignment") {
  const Setup s = make({{0.2, 0.3}, {0.7, 0.5}, {0.4, 0.8}});
  const auto voronoi = assign_cells(s.base);
  const std::vector<double> c3 = {0.4, 0.4, 0.4};
  CHECK(assign_cells(shift_fields(s.base, c3)) == voronoi);
  const std::vector<double> zero = {0, 0, 0};
  CHECK(assign_cells(shift_fields(s.base, zero)) == voronoi);
}

TEST_CASE("power: raising one weight grows its cell") {
  const Setup s = make({{0.2, 0.3}, {0.7, 0.5}, {0.4, 0.8}});
  const auto before = assign_cells(s.base);
  const std::vector<double> w = {0.0, 0.15, 0.0};
  const auto after = assign_cells(shift_fields(s.base, w));
  int grew = 0;
  for (int i = 0; i < s.mesh.size(); ++i) {
    if (before[i] == 1) CHECK(after[i] == 1);
    grew += before[i] != 1 && after[i] == 1;
  }
  CHECK(grew > 0);
}

TEST_CASE("power: capacities") {
  const Setup s = make({{0.25, 0.5}, {0.75, 0.5}});
  const auto one = capacities(s.mesh, s.density, std::vector<int>(s.mesh.size(), 0), 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(1.0).epsilon(1e-12));
  const auto two = capacities(s.mesh, s.density, assign_cells(s.base), 2);
  CHECK(std::abs(two[0] - 0.5) <= 2 * s.mesh.max_area() * std::sqrt(1.0 / s.mesh.max_area()));
  CHECK(two[0] + two[1] == doctest::Approx(1.0).epsilon(1e-12 * s.mesh.size()));
  const auto empty = capacities(s.mesh, s.density, std::vector<int>(s.mesh.size(), 0), 3);
  CHECK(empty[1] == 0.0);
  CHECK(empty[2] == 0.0);
}

TEST_CASE("power: capacity validation") {
  CHECK_NOTHROW(validate_capacities(std::vector<double>{0.7, 0.3}, 2));
  CHECK_THROWS_AS(validate_capacities(std::vector<double>{0.7, 0.4}, 2), InvalidArgument);
  CHECK_THROWS_AS(validate_capacities(std::vector<double>{1.0, 0.0}, 2), InvalidArgument);
  CHECK_THROWS_AS(validate_capacities(std::vector<double>{1.0}, 2), InvalidArgument);
}

TEST_CASE("power: current capacities need no ascent") {
  const Setup s = make({{0.2, 0.3}, {0.7, 0.5}, {0.4, 0.8}});
  const auto c = capacities(s.mesh, s.density, assign_cells(s.base), 3);
  const auto r = optimize_weights(s.base, s.mesh, s.density, c);
  CHECK(r.steps == 0);
  CHECK(r.weights == std::vector<double>{0, 0, 0});
  CHECK(r.gap <= 1e-12);
}

TEST_CASE("power: two cells against the bisection oracle") {
  const Point2 a{0.3, 0.5}, b{0.7, 0.5};
  const Setup s = make({a, b}, 0.002);
  const std::vector<double> c = {0.7, 0.3};
  WeightOptions opt;
  const auto r = optimize_weights(s.base, s.mesh, s.density, c, opt);
  CHECK(r.gap <= 0.01 * 0.3);
  CHECK(gap(r.capacities, c) == r.gap);
  CHECK(r.weights[1] == 0.0);
  CHECK(r.weights[0] > r.weights[1]);
  const double t = oracle::bisect_shift(s.mesh, masses(s), a, b, 0.7, -1.0, 1.0);
  // Any shift inside the flat band of the oracle mass is admissible; the band is a few node widths.
  CHECK(std::abs(r.weights[0] - t) <= 0.05);
}

TEST_CASE("power: ascent is monotone and restarts finish immediately") {
  const Setup s = make({{0.4, 0.4}, {0.4, 0.6}, {0.5, 0.4}, {0.5, 0.6}, {0.6, 0.4}, {0.6, 0.6}}, 0.003);
  const std::vector<double> c = {0.3, 0.25, 0.18, 0.12, 0.1, 0.05};
  WeightOptions opt;
  opt.tol_cap = 0.01;
  const auto r = optimize_weights(s.base, s.mesh, s.density, c, opt);
  CHECK(r.gap <= 0.01);
  REQUIRE(!r.objective.empty());
  for (std::size_t n = 1; n < r.objective.size(); ++n) CHECK(r.objective[n] >= r.objective[n - 1] - 1e-9);
  CHECK(*std::min_element(r.weights.begin(), r.weights.end()) == 0.0);
  const auto again = optimize_weights(s.base, s.mesh, s.density, c, opt, r.weights);
  CHECK(again.steps <= 2);
  CHECK(again.gap <= 0.01);
}

TEST_CASE("power: gauge invariance") {
  const Setup s = make({{0.2, 0.3}, {0.7, 0.5}, {0.4, 0.8}});
  const std::vector<double> w = {0.05, 0.0, 0.12};
  std::vector<double> shifted = w;
  for (double& x : shifted) x += 3.25;
  const auto la = assign_cells(shift_fields(s.base, w));
  const auto lb = assign_cells(shift_fields(s.base, shifted));
  CHECK(la == lb);
  CHECK(capacities(s.mesh, s.density, la, 3) == capacities(s.mesh, s.density, lb, 3));
  for (int k = 0; k < 3; ++k) CHECK(euclidean_centroid(s.mesh, s.density, la, k) == euclidean_centroid(s.mesh, s.density, lb, k));
  const std::vector<double> c = {0.3, 0.4, 0.3};
  CHECK(dual_objective(s.mesh, s.density, s.base, c, w) ==
        doctest::Approx(dual_objective(s.mesh, s.density, s.base, c, shifted)).epsilon(1e-12));
}

TEST_CASE("power: unreachable tolerance raises CapacityError with the best weights") {
  const Setup s = make({{0.4, 0.4}, {0.4, 0.6}, {0.5, 0.4}, {0.5, 0.6}, {0.6, 0.4}, {0.6, 0.6}});
  const std::vector<double> c = {0.3, 0.25, 0.18, 0.12, 0.1, 0.05};
  WeightOptions opt;
  opt.tol_cap = 1e-9;
  opt.max_ascent = 30;
  try {
    optimize_weights(s.base, s.mesh, s.density, c, opt);
    FAIL("expected CapacityError");
  } catch (const CapacityError& e) {
    CHECK(e.weights().size() == 6);
    CHECK(e.gap() > 1e-9);
  }
}

TEST_CASE("power: symmetric equal capacities keep equal weights") {
  // Each grid square is split into four triangles through its centre, so the
  // mesh is mirror symmetric about x = 1/2.
  const int n = 12;
  std::vector<Point2> v;
  std::vector<Triangle> t;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) v.push_back({double(i) / n, double(j) / n});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = j * (n + 1) + i, b = a + 1, c = a + n + 2, d = a + n + 1;
      const int m = static_cast<int>(v.size());
      v.push_back({(i + 0.5) / n, (j + 0.5) / n});
      t.insert(t.end(), {{a, b, m}, {b, c, m}, {c, d, m}, {d, a, m}});
    }
  const Mesh mesh = Mesh::from_triangles(v, t);
  const DensityField d = build_density(mesh, DensitySpec::uniform());
  const std::vector<Point2> mu0 = {{0.3, 0.5}, {0.7, 0.5}};
  const std::vector<double> c = {0.5, 0.5};
  const Tessellation r = run_capacity_cvt(mesh, MetricSpec::euclidean(), d, mu0, c);
  CHECK_FALSE(r.infeasible);
  CHECK(gap(r.capacities, c) <= 0.005);
  // The centroid support triangulation breaks mirror ties, so the fields are
  // symmetric only up to the solver error (0.05 on meshes of this size).
  CHECK(std::abs(r.weights[0] - r.weights[1]) <= 0.05);
  CHECK(std::min(r.weights[0], r.weights[1]) == 0.0);
}

TEST_CASE("power: single cell") {
  const Mesh m = generate_rect_mesh(0, 1, 0, 1, 0.01);
  const DensityField d = build_density(m, DensitySpec::uniform());
  const std::vector<Point2> mu0 = {{0.2, 0.2}};
  const std::vector<double> c = {1.0};
  const Tessellation t = run_capacity_cvt(m, MetricSpec::euclidean(), d, mu0, c);
  CHECK(t.converged);
  CHECK(t.weights == std::vector<double>{0.0});
  CHECK(t.capacities[0] == doctest::Approx(1.0));
}
