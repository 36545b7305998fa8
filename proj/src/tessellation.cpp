#include "geotess/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "geotess/errors.hpp"
#include "geotess/summation.hpp"

namespace geotess {

namespace {

constexpr double kGolden = 0.6180339887498949;

std::vector<int> cell_members(std::span<const int> labels, int k) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    if (labels[i] == k) out.push_back(i);
  return out;
}

// Gradient of v -> gauge(x, v) at a unit vector t, by central differences.
// For the Euclidean gauge this is t itself.
Point2 gauge_gradient(const MetricSpec& metric, const Point2& x, const Point2& t) {
  if (metric.is_euclidean()) return t;
  const double e = 1e-6;
  const double gx = gauge(metric, x, {t.x + e, t.y}) - gauge(metric, x, {t.x - e, t.y});
  const double gy = gauge(metric, x, {t.x, t.y + e}) - gauge(metric, x, {t.x, t.y - e});
  return {gx / (2.0 * e), gy / (2.0 * e)};
}

}  // namespace

EnergyMode parse_energy_mode(const std::string& name) {
  if (name == "squared") return EnergyMode::Squared;
  if (name == "unsquared") return EnergyMode::Unsquared;
  throw InvalidArgument("unknown energy mode '" + name + "' (expected squared or unsquared)");
}

std::string to_string(EnergyMode mode) { return mode == EnergyMode::Squared ? "squared" : "unsquared"; }

std::vector<int> source_nodes(const Mesh& mesh, std::span<const Point2> mu) {
  std::vector<int> out;
  out.reserve(mu.size());
  for (const auto& p : mu) out.push_back(mesh.nearest_node(p));
  return out;
}

std::vector<int> assign_cells(std::span<const DistanceField> fields) {
  if (fields.empty()) throw InvalidArgument("assign_cells needs at least one field");
  const int n = fields[0].size();
  for (const auto& f : fields)
    if (f.size() != n) throw InvalidArgument("fields live on different meshes");
  std::vector<int> labels(n, 0);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double bv = fields[0].values[i];
    for (int k = 1; k < static_cast<int>(fields.size()); ++k) {
      if (fields[k].values[i] < bv) {
        bv = fields[k].values[i];
        best = k;
      }
    }
    if (bv == kUnreachable) throw UnreachableNode("triangle " + std::to_string(i) + " is unreachable from every generator", i);
    labels[i] = best;
  }
  return labels;
}

Point2 euclidean_centroid(const Mesh& mesh, const DensityField& density, std::span<const int> labels, int k) {
  CompensatedSum m, mx, my;
  for (int i = 0; i < mesh.size(); ++i) {
    if (labels[i] != k) continue;
    const double w = node_mass(mesh, density, i);
    m += w;
    mx += w * mesh.centroid(i).x;
    my += w * mesh.centroid(i).y;
  }
  if (!(m.value() > 0.0)) throw EmptyCell("cell " + std::to_string(k) + " has no mass", k);
  return {mx.value() / m.value(), my.value() / m.value()};
}

double cell_energy(const Mesh& mesh, const DensityField& density, const DistanceField& field,
                   std::span<const int> labels, int k, EnergyMode mode) {
  CompensatedSum s;
  for (int i = 0; i < mesh.size(); ++i) {
    if (labels[i] != k) continue;
    const double d = field.values[i] - field.source_value;
    s += node_mass(mesh, density, i) * (mode == EnergyMode::Squared ? d * d : d);
  }
  return s.value();
}

double kmeans_energy(const Mesh& mesh, const DensityField& density, const Tessellation& t, EnergyMode mode) {
  CompensatedSum s;
  for (int k = 0; k < t.K; ++k) s += cell_energy(mesh, density, t.fields[k], t.labels, k, mode);
  return s.value();
}

CentroidResult geodesic_centroid(const EikonalSolver& solver, const DensityField& density,
                                 std::span<const int> labels, int k, Point2 init, double eps_c,
                                 const LloydConfig& config, const DistanceField* init_field) {
  if (!(eps_c > 0.0)) throw InvalidArgument("eps_c must be positive");
  const Mesh& mesh = solver.mesh();
  const MetricSpec& metric = solver.metric();
  const std::vector<int> cell = cell_members(labels, k);
  CompensatedSum total;
  for (int j : cell) total += node_mass(mesh, density, j);
  if (cell.empty() || !(total.value() > 0.0)) throw EmptyCell("cell " + std::to_string(k) + " has no mass", k);

  CentroidResult res;
  if (cell.size() == 1) {
    res.point = mesh.centroid(cell[0]);
    return res;
  }

  auto nearest_in_cell = [&](const Point2& p) {
    int best = cell[0];
    double bd = distance(mesh.centroid(best), p);
    for (int j : cell) {
      const double d = distance(mesh.centroid(j), p);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    return mesh.centroid(best);
  };
  auto project = [&](const Point2& p) {
    const int node = mesh.nearest_node(p);
    return labels[node] == k && mesh.contains(p) ? p : nearest_in_cell(p);
  };
  const bool squared = config.energy_mode == EnergyMode::Squared;
  auto objective = [&](const DistanceField& f) {
    CompensatedSum s;
    for (int j : cell) {
      if (f.values[j] == kUnreachable) return kUnreachable;
      const double d = f.values[j];
      s += node_mass(mesh, density, j) * (squared ? d * d : d);
    }
    return s.value();
  };

  Point2 z = project(init);
  DistanceField field;
  if (init_field && init_field->source_point.x == z.x && init_field->source_point.y == z.y &&
      init_field->source_value == 0.0) {
    field = *init_field;
  } else {
    field = solver.solve_from_point(z, config.solver);
    ++res.solves;
  }
  double hz = objective(field);
  res.initial_objective = hz;
  const double step = std::sqrt(mesh.mean_area());
  for (int it = 0; it < config.max_descent_steps; ++it) {
    double reach = 0.0;
    for (int j : cell) reach = std::max(reach, distance(mesh.centroid(j), z));
    // -grad H(z) = sum_j m_j grad g(t_j), with t_j the unit departure
    // direction of the geodesic from z to X_j and g the gauge of C(z);
    // squared mode weights each term by 2 U_j.
    Point2 dir{0.0, 0.0};
    for (int j : cell) {
      const Point2& x = mesh.centroid(j);
      Point2 t = x - z;
      if (norm(t) > step) {
        try {
          const auto path = backtrack_geodesic(mesh, metric, field, x, step);
          if (path.size() >= 2) t = path[path.size() - 2] - z;
        } catch (const BacktrackError&) {
          continue;  // contributes nothing to the direction
        }
      }
      const double len = norm(t);
      const double wj = node_mass(mesh, density, j) * (squared ? 2.0 * field.values[j] : 1.0);
      if (len > 0.0) dir = dir + wj * gauge_gradient(metric, z, t * (1.0 / len));
    }

    Point2 best_z = z;
    double best_h = hz;
    DistanceField best_field;
    auto eval = [&](const Point2& d, double a) {
      const Point2 zc = project(z + a * d);
      DistanceField fc = solver.solve_from_point(zc, config.solver);
      ++res.solves;
      const double h = objective(fc);
      if (h < best_h && distance(zc, z) > 0.0) {
        best_h = h;
        best_z = zc;
        best_field = std::move(fc);
      }
      return h;
    };
    // Golden-section search on alpha in [0, reach]; if no candidate improves
    // H, try alpha = reach / 2^s for s = 1..20.
    auto line_search = [&](Point2 d) {
      const double dn = norm(d);
      if (!(dn > 0.0)) return false;
      d = d * (1.0 / dn);
      int budget = std::max(2, config.line_search_candidates) - 2;
      double a = 0.0, b = reach;
      double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
      double h1 = eval(d, x1), h2 = eval(d, x2);
      while (budget-- > 0) {
        if (h1 <= h2) {
          b = x2;
          x2 = x1;
          h2 = h1;
          x1 = b - kGolden * (b - a);
          h1 = eval(d, x1);
        } else {
          a = x1;
          x1 = x2;
          h1 = h2;
          x2 = a + kGolden * (b - a);
          h2 = eval(d, x2);
        }
      }
      double amax = reach;
      for (int shrink = 0; best_h >= hz && shrink < 20; ++shrink) {
        amax *= 0.5;
        eval(d, amax);
      }
      return best_h < hz;
    };
    // Non-unique geodesics (polygonal control sets) can make the departure
    // directions useless; fall back to a central-difference gradient of H.
    auto fd_direction = [&] {
      const double e = std::max(eps_c, step);
      auto value = [&](const Point2& p) {
        ++res.solves;
        return objective(solver.solve_from_point(p, config.solver));
      };
      auto partial = [&](const Point2& u) {
        const Point2 p = z + e * u, m = z - e * u;
        const bool pin = mesh.contains(p), min = mesh.contains(m);
        if (pin && min) return (value(p) - value(m)) / (2.0 * e);
        if (pin) return (value(p) - hz) / e;
        if (min) return (hz - value(m)) / e;
        return 0.0;
      };
      return Point2{-partial({1.0, 0.0}), -partial({0.0, 1.0})};
    };
    const bool accepted = line_search(dir) || line_search(fd_direction());
    if (!accepted) {
      res.stalled = true;
      break;
    }
    const double moved = distance(best_z, z);
    z = best_z;
    hz = best_h;
    field = std::move(best_field);
    ++res.steps;
    if (moved < eps_c) break;
  }
  res.point = z;
  res.objective = hz;
  return res;
}

namespace detail {

LloydConfig resolve(const Mesh& mesh, LloydConfig config) {
  if (config.eps <= 0.0) config.eps = mesh.max_area() / 10.0;
  if (config.eps_c <= 0.0) config.eps_c = 0.25 * std::sqrt(mesh.mean_area());
  if (config.max_outer < 1) throw InvalidArgument("max_outer must be at least 1");
  if (config.threads < 1) config.threads = 1;
  return config;
}

void validate_generators(const Mesh& mesh, std::span<const Point2> mu0) {
  if (mu0.empty()) throw InvalidArgument("at least one generator is required");
  if (static_cast<int>(mu0.size()) > mesh.size())
    throw InvalidArgument("K = " + std::to_string(mu0.size()) + " exceeds the triangle count " +
                          std::to_string(mesh.size()));
  for (size_t k = 0; k < mu0.size(); ++k) {
    if (!mesh.contains(mu0[k]))
      throw InvalidArgument("generator " + std::to_string(k) + " lies outside the domain");
    for (size_t j = 0; j < k; ++j)
      if (mu0[j].x == mu0[k].x && mu0[j].y == mu0[k].y)
        throw InvalidArgument("generators " + std::to_string(j) + " and " + std::to_string(k) + " coincide");
  }
}

std::vector<DistanceField> solve_all(const EikonalSolver& solver, std::span<const Point2> mu,
                                     const LloydConfig& config) {
  const int K = static_cast<int>(mu.size());
  const std::vector<int> sources = source_nodes(solver.mesh(), mu);
  auto one = [&](int k) {
    return config.point_sources ? solver.solve_from_point(mu[k], config.solver)
                                : solver.solve(sources[k], 0.0, config.solver);
  };
  std::vector<DistanceField> out(K);
  const int workers = std::min(config.threads, K);
  if (workers <= 1) {
    for (int k = 0; k < K; ++k) out[k] = one(k);
    return out;
  }
  std::vector<std::exception_ptr> errors(K);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int k = w; k < K; k += workers) {
        try {
          out[k] = one(k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<Point2> update_centroids(const EikonalSolver& solver, const DensityField& density,
                                     std::span<const int> labels, std::span<const Point2> mu,
                                     std::span<const DistanceField> fields, const LloydConfig& config,
                                     std::vector<std::string>& log) {
  const Mesh& mesh = solver.mesh();
  const int K = static_cast<int>(mu.size());
  std::vector<Point2> next(mu.begin(), mu.end());
  std::vector<char> empty(K, 1);
  for (int l : labels) empty[l] = 0;
  const bool squared = config.energy_mode == EnergyMode::Squared;
  auto cell_objective = [&](const DistanceField& f, int k) {
    CompensatedSum s;
    for (int i = 0; i < mesh.size(); ++i)
      if (labels[i] == k) {
        const double d = f.values[i] - f.source_value;
        s += node_mass(mesh, density, i) * (squared ? d * d : d);
      }
    return s.value();
  };
  auto compute = [&](int k) {
    const DistanceField* start = config.point_sources ? &fields[k] : nullptr;
    if (solver.metric().is_euclidean()) {
      const Point2 mean = euclidean_centroid(mesh, density, labels, k);
      if (!config.monotone_update) return mean;
      // Keep the closed-form mean unless it raises the cell's cost; then fall
      // back to descent from the current generator.
      const double before = start ? cell_objective(*start, k) : cell_objective(solver.solve_from_point(mu[k], config.solver), k);
      const int node = mesh.nearest_node(mean);
      if (labels[node] == k && mesh.contains(mean)) {
        const double after = cell_objective(solver.solve_from_point(mean, config.solver), k);
        if (after <= before) return mean;
      }
    }
    const CentroidResult r = geodesic_centroid(solver, density, labels, k, mu[k], config.eps_c, config, start);
    return r.point;
  };
  const int workers = std::min(config.threads, K);
  std::vector<std::exception_ptr> errors(K);
  auto work = [&](int k) {
    if (empty[k]) return;
    try {
      next[k] = compute(k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (workers <= 1) {
    for (int k = 0; k < K; ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int k = w; k < K; k += workers) work(k);
      });
    for (auto& t : pool) t.join();
  }
  for (int k = 0; k < K; ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    if (empty[k]) log.push_back("cell " + std::to_string(k) + " is empty; generator kept in place");
  }
  return next;
}

double max_displacement(std::span<const Point2> a, std::span<const Point2> b) {
  double d = 0.0;
  for (size_t k = 0; k < a.size(); ++k) d = std::max(d, distance(a[k], b[k]));
  return d;
}

}  // namespace detail

Tessellation run_cvt(const Mesh& mesh, const MetricSpec& metric, const DensityField& density,
                     std::span<const Point2> mu0, const LloydConfig& config_in) {
  detail::validate_generators(mesh, mu0);
  const LloydConfig config = detail::resolve(mesh, config_in);
  const EikonalSolver solver(mesh, metric, config.eikonal);
  const int K = static_cast<int>(mu0.size());

  Tessellation t;
  t.K = K;
  t.mu.assign(mu0.begin(), mu0.end());
  t.weights.assign(K, 0.0);
  std::vector<int> empty_run(K, 0);
  std::vector<Point2> prev;

  for (int n = 0;; ++n) {
    const std::vector<int> sources = source_nodes(mesh, t.mu);
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < k; ++j)
        if (sources[j] == sources[k])
          t.log.push_back("iteration " + std::to_string(n) + ": generators " + std::to_string(j) + " and " +
                          std::to_string(k) + " share node " + std::to_string(sources[k]));
    t.fields = detail::solve_all(solver, t.mu, config);
    t.labels = assign_cells(t.fields);

    IterationRecord rec;
    rec.mu = t.mu;
    rec.displacement = prev.empty() ? 0.0 : detail::max_displacement(t.mu, prev);
    rec.weights = t.weights;
    rec.capacities.assign(K, 0.0);
    {
      std::vector<CompensatedSum> cap(K);
      for (int i = 0; i < mesh.size(); ++i) cap[t.labels[i]] += node_mass(mesh, density, i);
      for (int k = 0; k < K; ++k) rec.capacities[k] = cap[k].value();
    }
    rec.energy_squared = kmeans_energy(mesh, density, t, EnergyMode::Squared);
    rec.energy_unsquared = kmeans_energy(mesh, density, t, EnergyMode::Unsquared);
    for (int k = 0; k < K; ++k) {
      const bool empty = std::find(t.labels.begin(), t.labels.end(), k) == t.labels.end();
      rec.empty_cells += empty ? 1 : 0;
      empty_run[k] = empty ? empty_run[k] + 1 : 0;
      if (empty_run[k] >= 3) throw EmptyCell("cell " + std::to_string(k) + " stayed empty for 3 iterations", k);
    }
    t.history.push_back(rec);
    t.capacities = rec.capacities;

    if (!prev.empty() && rec.displacement < config.eps) {
      t.converged = true;
      break;
    }
    if (n >= config.max_outer) {
      t.log.push_back("stopped at max_outer = " + std::to_string(config.max_outer) + " without convergence");
      break;
    }
    prev = t.mu;
    t.mu = detail::update_centroids(solver, density, t.labels, t.mu, t.fields, config, t.log);
  }
  return t;
}

}  // namespace geotess
