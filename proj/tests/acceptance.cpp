// One PASS/FAIL line per acceptance criterion. Usage: geotess_acceptance [1-8]...
// Tolerances are fixed here; the exit status is nonzero if any selected
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "geotess/config.hpp"
#include "geotess/power.hpp"
#include "geotess/report.hpp"
#include "geotess/tessellation.hpp"
#include "oracles/dijkstra.hpp"

using namespace geotess;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string config_path(const std::string& name) { return std::string(GEOTESS_CONFIG_DIR) + "/" + name; }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// 1. Eikonal accuracy on the unit square.
constexpr double kA1MaxError = 0.05;
constexpr double kA1MinRatio = 1.3;
constexpr double kA1MaxSeconds = 30.0;

Outcome eikonal_accuracy() {
  double err[2], secs = 0.0;
  int n[2];
  const double areas[2] = {1e-3, 5e-4};
  for (int r = 0; r < 2; ++r) {
    const Mesh m = generate_rect_mesh(0, 1, 0, 1, areas[r]);
    const int src = m.nearest_node({0.5, 0.5});
    const auto t0 = Clock::now();
    const DistanceField f = EikonalSolver(m, MetricSpec::euclidean()).solve_value_iteration(src);
    secs = std::max(secs, since(t0));
    err[r] = 0.0;
    for (int i = 0; i < m.size(); ++i)
      err[r] = std::max(err[r], std::abs(f.values[i] - distance(m.centroid(i), m.centroid(src))));
    n[r] = m.size();
  }
  const double ratio = err[0] / err[1];
  const bool pass = err[0] <= kA1MaxError && ratio >= kA1MinRatio && secs <= kA1MaxSeconds;
  return {pass, format("N=%d err=%.4f; N=%d err=%.4f; ratio=%.3f (>= %.1f); max solve %.2fs", n[0], err[0], n[1],
                       err[1], ratio, kA1MinRatio, secs)};
}

// 2. Test 3: L-shape, Chebyshev, K = 3, two initialisations.
constexpr double kA2Radius = 0.05;
constexpr double kA2MaxSeconds = 300.0;

Outcome test3() {
  const std::vector<Point2> target = {{0.5, 0.5}, {-0.5, -0.5}, {-0.5, 0.5}};
  bool pass = true;
  std::string detail;
  for (const char* name : {"test3_a.ini", "test3_b.ini"}) {
    const RunConfig c = load_config(config_path(name));
    const Mesh m = build_mesh(c);
    const auto t0 = Clock::now();
    const Tessellation t =
        run_cvt(m, build_metric(c.metric), build_density(m, c), resolve_generators(c, m), lloyd_config(c));
    const double secs = since(t0);
    // Match each target to its nearest final generator.
    double worst = 0.0;
    for (const auto& p : target) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : t.mu) best = std::min(best, distance(p, q));
      worst = std::max(worst, best);
    }
    pass = pass && worst <= kA2Radius && secs <= kA2MaxSeconds;
    detail += format("%s: max offset %.3f in %.1fs, mu=", name, worst, secs);
    for (const auto& q : t.mu) detail += format("(%.3f,%.3f)", q.x, q.y);
    detail += "; ";
  }
  return {pass, detail};
}

// 3. Test 1: unsquared energy non-increasing, convergence before max_outer.
Outcome lloyd_monotone() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"test1_a.ini", "test1_b.ini", "test1_c.ini"}) {
    const RunConfig c = load_config(config_path(name));
    const Mesh m = build_mesh(c);
    const LloydConfig cfg = lloyd_config(c);
    const Tessellation t = run_cvt(m, build_metric(c.metric), build_density(m, c), resolve_generators(c, m), cfg);
    const double slack = 3.0 * cfg.eikonal.tol;
    double worst_rise = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n < t.history.size(); ++n)
      worst_rise = std::max(worst_rise, t.history[n].energy_unsquared - t.history[n - 1].energy_unsquared);
    const bool ok = t.converged && worst_rise <= slack && c.max_outer == 100;
    pass = pass && ok;
    detail += format("%s: %zu iterations, converged=%d, largest step change %.2e; ", name, t.history.size(),
                     int(t.converged), worst_rise);
  }
  return {pass, detail};
}

// 4. Test 5 capacities.
constexpr double kA4MaxGap = 0.01;
constexpr double kA4MaxSeconds = 300.0;

Outcome test5() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"test5_k6.ini", "test5_k8.ini"}) {
    const RunConfig c = load_config(config_path(name));
    const Mesh m = build_mesh(c);
    const auto t0 = Clock::now();
    Tessellation t;
    try {
      t = run_capacity_cvt(m, build_metric(c.metric), build_density(m, c), resolve_generators(c, m), c.capacities,
                           power_config(c));
    } catch (const CapacityError& e) {
      pass = false;
      detail += format("%s: capacity error, gap %.4f; ", name, e.gap());
      continue;
    }
    const double secs = since(t0);
    double gap = 0.0;
    for (int k = 0; k < t.K; ++k) gap = std::max(gap, std::abs(t.capacities[k] - c.capacities[k]));
    pass = pass && gap <= kA4MaxGap && t.converged && !t.infeasible && secs <= kA4MaxSeconds;
    detail += format("%s: gap %.4f, converged=%d, %zu iterations, %.1fs; ", name, gap, int(t.converged),
                     t.history.size(), secs);
  }
  return {pass, detail};
}

// 5. Shift covariance, bitwise.
Outcome shift_covariance() {
  const Mesh square = generate_rect_mesh(0, 1, 0, 1, 0.003);
  const Mesh lshape = generate_composite_mesh(CompositeDomain::LShape, 0.01);
  const std::vector<MetricSpec> metrics = {
      MetricSpec::euclidean(),
      MetricSpec::isotropic(ScalarField::expression("1 + 0.5*x*x"), 1.0),
      MetricSpec::minkowski(1.0),
      MetricSpec::minkowski(std::numeric_limits<double>::infinity()),
      MetricSpec::riemannian(MatrixField::expression("1, 0, (1 - 0.8*(abs(y) < 0.2))^2"), 0.2)};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  int cases = 0, mismatches = 0;
  for (int c = 0; c < 10; ++c) {
    const Mesh& m = c % 2 ? lshape : square;
    const MetricSpec& metric = metrics[c % metrics.size()];
    const int src = static_cast<int>(rng() % static_cast<std::uint64_t>(m.size()));
    const double wk = w(rng);
    const EikonalSolver solver(m, metric);
    std::vector<SolverKind> kinds = {SolverKind::ValueIteration};
    if (metric.is_isotropic()) kinds.push_back(SolverKind::FastMarching);
    for (SolverKind kind : kinds) {
      const auto base = solver.solve(src, 0.0, kind);
      const auto shifted = solver.solve(src, -wk, kind);
      for (int i = 0; i < m.size(); ++i)
        if (shifted.values[i] != base.values[i] - wk) ++mismatches;
      ++cases;
    }
  }
  return {mismatches == 0, format("%d solves compared, %d node mismatches", cases, mismatches)};
}

// 6. Agreement with Dijkstra on the centroid graph.
constexpr double kA6Tolerance = 0.05;

Outcome dijkstra_agreement() {
  struct Case {
    const char* name;
    Mesh mesh;
    MetricSpec metric;
  };
  const Mesh square = generate_rect_mesh(0, 1, 0, 1, 1e-3);
  const Mesh lshape = generate_composite_mesh(CompositeDomain::LShape, 1.6e-3);
  const auto cheb = MetricSpec::minkowski(std::numeric_limits<double>::infinity());
  const std::vector<Case> cases = {
      {"square/euclidean", square, MetricSpec::euclidean()},
      {"square/chebyshev", square, cheb},
      {"square/l1", square, MetricSpec::minkowski(1.0)},
      {"square/isotropic", square, MetricSpec::isotropic(ScalarField::expression("1 + 0.5*x"), 1.0)},
      {"square/riemannian", square, MetricSpec::riemannian(MatrixField::constant({1.0, 0.3, 0.5}), 0.5)},
      {"lshape/euclidean", lshape, MetricSpec::euclidean()},
      {"lshape/chebyshev", lshape, cheb}};
  const std::vector<Point2> sources = {{0.5, 0.5}, {0.2, 0.8}, {0.85, 0.15}};
  double tol = kA6Tolerance;
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    if (c.mesh.size() > 2000) return {false, std::string(c.name) + ": mesh exceeds 2000 triangles"};
    const EikonalSolver solver(c.mesh, c.metric);
    tol = std::max(kA6Tolerance, 3.0 * solver.options().tol);
    double worst = 0.0;
    for (const auto& p : sources) {
      const int src = c.mesh.nearest_node(p);
      const auto f = solver.solve_value_iteration(src);
      const auto d = oracle::dijkstra(c.mesh, src, [&](const Point2& a, const Point2& b) {
        return gauge(c.metric, 0.5 * (a + b), b - a);
      });
      for (int i = 0; i < c.mesh.size(); ++i) worst = std::max(worst, std::abs(f.values[i] - d[i]));
    }
    pass = pass && worst <= tol;
    detail += format("%s(N=%d) %.4f; ", c.name, c.mesh.size(), worst);
  }
  return {pass, detail + format("tolerance %.3f", tol)};
}

// 7. Geodesic centroid against the closed-form mean under the Euclidean metric.
Outcome centroid_agreement() {
  const Mesh m = generate_rect_mesh(0, 1, 0, 1, 2e-3);
  const DensityField d = build_density(m, DensitySpec::uniform());
  const EikonalSolver solver(m, MetricSpec::euclidean());
  const double tol = 2.0 * std::sqrt(m.mean_area());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  double worst = 0.0;
  for (int cell = 0; cell < 10; ++cell) {
    std::vector<Point2> mu;
    for (int k = 0; k < 4; ++k) mu.push_back({u(rng), u(rng)});
    std::vector<DistanceField> fields;
    for (const auto& p : mu) fields.push_back(solver.solve_from_point(p, SolverKind::ValueIteration));
    const auto labels = assign_cells(fields);
    const int k = cell % 4;
    const Point2 mean = euclidean_centroid(m, d, labels, k);
    const auto r = geodesic_centroid(solver, d, labels, k, mu[k], 0.25 * std::sqrt(m.mean_area()), LloydConfig{},
                                     &fields[k]);
    worst = std::max(worst, distance(r.point, mean));
  }
  return {worst <= tol, format("10 cells, max distance %.4f (tolerance %.4f)", worst, tol)};
}

// 8. Determinism of the Test 1 reports.
Outcome determinism() {
  const RunConfig c = load_config(config_path("test1_a.ini"));
  std::string csv[2], json[2];
  for (int r = 0; r < 2; ++r) {
    const Mesh m = build_mesh(c);
    const Tessellation t =
        run_cvt(m, build_metric(c.metric), build_density(m, c), resolve_generators(c, m), lloyd_config(c));
    csv[r] = labels_csv(t) + capacities_csv(t, {});
    json[r] = tessellation_json(c, m, t);
  }
  const bool pass = csv[0] == csv[1] && json[0] == json[1];
  return {pass, format("labels/capacities CSV identical=%d, report JSON identical=%d (%zu bytes)", int(csv[0] == csv[1]),
                       int(json[0] == json[1]), json[0].size())};
}

const std::vector<std::pair<const char*, std::function<Outcome()>>> kCriteria = {
    {"eikonal accuracy", eikonal_accuracy},     {"test 3 reproduction", test3},
    {"lloyd monotonicity", lloyd_monotone},     {"test 5 capacities", test5},
    {"shift covariance", shift_covariance},     {"dijkstra oracle agreement", dijkstra_agreement},
    {"geodesic vs euclidean centroid", centroid_agreement}, {"determinism", determinism}};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));
  if (selected.empty())
    for (std::size_t i = 1; i <= kCriteria.size(); ++i) selected.push_back(static_cast<int>(i));
  int failed = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const auto& [name, run] = kCriteria[id - 1];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
