#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "geotess/density.hpp"
#include "geotess/errors.hpp"
#include "geotess/mesh.hpp"

using namespace geotess;

TEST_CASE("mesh: unit square with two triangles") {
  const Mesh m = Mesh::from_triangles({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
  CHECK(m.size() == 2);
  CHECK(m.total_area() == doctest::Approx(1.0));
  CHECK(m.area(0) == doctest::Approx(0.5));
  CHECK(m.centroid(0).x == doctest::Approx(2.0 / 3.0));
  CHECK(m.centroid(0).y == doctest::Approx(1.0 / 3.0));
  CHECK(m.tri_adjacency()[0] == std::vector<int>{1});
}

TEST_CASE("mesh: clockwise triangles are reoriented") {
  const Mesh m = Mesh::from_triangles({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}});
  const auto& t = m.triangles()[0];
  CHECK(orient2d(m.vertices()[t[0]], m.vertices()[t[1]], m.vertices()[t[2]]) > 0.0);
  CHECK(m.area(0) == doctest::Approx(0.5));
}

TEST_CASE("mesh: invalid input") {
  CHECK_THROWS_AS(Mesh::from_triangles({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}), InvalidArgument);
  CHECK_THROWS_AS(Mesh::from_triangles({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 3}}), InvalidArgument);
  CHECK_THROWS_AS(parse_mesh("geomesh v1 3 1\n0 0\n1 0\n2 0\n0 1 2\n"), LoadError);
  CHECK_THROWS_AS(parse_mesh("geomesh v1 3 1\n0 0\n1 0\n"), LoadError);
  CHECK_THROWS_AS(parse_mesh("nonsense\n"), LoadError);
  try {
    parse_mesh("geomesh v1 3 1\n0 0\n1 0\n0 1\n0 1 7\n");
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    CHECK(e.line() == 5);
  }
}

TEST_CASE("mesh: text format round trip with comments") {
  const Mesh m = parse_mesh("# square\ngeomesh v1 4 2\n0 0\n1 0\n1 1 # corner\n0 1\n0 1 2\n0 2 3\n");
  const Mesh r = parse_mesh(format_mesh(m));
  CHECK(r.size() == m.size());
  CHECK(r.vertices() == m.vertices());
  CHECK(r.triangles() == m.triangles());
}

TEST_CASE("mesh: generated rectangle respects max_area and covers the domain") {
  const Mesh m = generate_rect_mesh(0, 1, 0, 1, 0.01);
  CHECK(m.max_area() <= 0.01 + 1e-15);
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.contains({0.5, 0.5}));
  CHECK_FALSE(m.contains({1.5, 0.5}));
}

TEST_CASE("mesh: refinement doubles the count and keeps the area within 2%") {
  const auto check = [](auto gen) {
    for (double a : {0.02, 0.005}) {
      const Mesh coarse = gen(a), fine = gen(a / 4);
      CHECK(fine.size() >= 2 * coarse.size());
      CHECK(std::abs(fine.total_area() - coarse.total_area()) <= 0.02 * coarse.total_area());
      CHECK(fine.max_area() <= a / 4 + 1e-15);
    }
  };
  check([](double a) { return generate_rect_mesh(-1, 1, -1, 1, a); });
  check([](double a) { return generate_disk_mesh({0, 0}, 1, a); });
  check([](double a) { return generate_composite_mesh(CompositeDomain::LShape, a); });
  check([](double a) { return generate_composite_mesh(CompositeDomain::SquaresQuarterDiskHole, a); });
}

TEST_CASE("mesh: composite domains") {
  const Mesh l = generate_composite_mesh(CompositeDomain::LShape, 0.01);
  CHECK(l.total_area() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK_FALSE(l.contains({0.5, -0.5}));
  CHECK_FALSE(l.segment_inside({0.9, 0.1}, {-0.1, -0.9}));
  CHECK(l.segment_inside({0.5, 0.5}, {-0.5, 0.5}));
  const Mesh s = generate_composite_mesh(CompositeDomain::SquaresQuarterDiskHole, 0.003);
  const double exact = composite_domain_area(CompositeDomain::SquaresQuarterDiskHole);
  CHECK(std::abs(s.total_area() - exact) <= 0.02 * exact);
  CHECK_FALSE(s.contains({-0.4, 0.4}));
  CHECK_THROWS_AS(parse_composite_domain("rabbit"), InvalidArgument);
}

TEST_CASE("mesh: centroids are vertex means") {
  const Mesh m = generate_disk_mesh({0.3, -0.2}, 0.7, 0.005);
  for (int i = 0; i < m.size(); ++i) {
    const auto& t = m.triangles()[i];
    const auto& v = m.vertices();
    CHECK(m.centroid(i).x == (v[t[0]].x + v[t[1]].x + v[t[2]].x) / 3.0);
    CHECK(m.centroid(i).y == (v[t[0]].y + v[t[1]].y + v[t[2]].y) / 3.0);
  }
}

TEST_CASE("mesh: nearest node") {
  const Mesh m = generate_rect_mesh(0, 1, 0, 1, 0.01);
  for (int i = 0; i < m.size(); i += 7) CHECK(m.nearest_node(m.centroid(i)) == i);
}

TEST_CASE("density: normalisation and validation") {
  const Mesh m = generate_rect_mesh(-1, 1, -1, 1, 0.01);
  const DensityField u = build_density(m, DensitySpec::uniform());
  CHECK(integrate(m, u, [](const Point2&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
  const DensityField g = build_density(m, DensitySpec::gaussian({0.2, 0}, {0.1, 0.02, 0.2}));
  CHECK(integrate(m, g, [](const Point2&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.rho[m.nearest_node({0.2, 0})] > g.rho[m.nearest_node({-0.9, -0.9})]);
  CHECK_THROWS_AS(build_density(m, DensitySpec::gaussian({0, 0}, {1, 2, 1})), InvalidDensity);
  CHECK_THROWS_AS(build_density(m, DensitySpec::from_table({1.0, 2.0})), InvalidDensity);
  std::vector<double> table(m.size(), 1.0);
  table[3] = -1.0;
  CHECK_THROWS_AS(build_density(m, DensitySpec::from_table(table)), InvalidDensity);
  CHECK_THROWS_AS(build_density(m, DensitySpec::from_table(std::vector<double>(m.size(), 0.0))), InvalidDensity);
}

TEST_CASE("density: integrate is linear and additive") {
  const Mesh m = generate_disk_mesh({0, 0}, 1, 0.01);
  const DensityField d = build_density(m, DensitySpec::gaussian({0, 0}, {0.3, 0, 0.3}));
  const auto f = [](const Point2& p) { return std::sin(3 * p.x) + p.y * p.y; };
  const auto g = [](const Point2& p) { return std::exp(p.x - p.y); };
  const double a = 1.7, b = -0.4;
  const double lhs = integrate(m, d, [&](const Point2& p) { return a * f(p) + b * g(p); });
  const double rhs = a * integrate(m, d, f) + b * integrate(m, d, g);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * m.size());
  std::vector<int> even, odd, all;
  for (int i = 0; i < m.size(); ++i) {
    (i % 2 ? odd : even).push_back(i);
    all.push_back(i);
  }
  const double split = integrate(m, d, std::span<const int>(even), f) + integrate(m, d, std::span<const int>(odd), f);
  CHECK(std::abs(split - integrate(m, d, std::span<const int>(all), f)) <= 1e-12 * m.size());
}
