#include "geotess/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "geotess/errors.hpp"

namespace geotess {

namespace {

constexpr double kWeightEps = 1e-14;
constexpr double kGolden = 0.6180339887498949;

double theta_of(int k, int n) { return 2.0 * std::numbers::pi * k / n; }

}  // namespace

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "value-iteration" || name == "vi") return SolverKind::ValueIteration;
  if (name == "fast-marching" || name == "fmm") return SolverKind::FastMarching;
  throw InvalidArgument("unknown solver '" + name + "' (expected value-iteration or fast-marching)");
}

std::string to_string(SolverKind kind) {
  return kind == SolverKind::ValueIteration ? "value-iteration" : "fast-marching";
}

EikonalSolver::EikonalSolver(const Mesh& mesh, const MetricSpec& metric, EikonalOptions options)
    : mesh_(&mesh), metric_(metric), options_(options) {
  if (mesh.empty()) throw InvalidArgument("eikonal solver needs a non-empty mesh");
  if (!(options_.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (options_.controls < 8) throw InvalidArgument("solver needs at least 8 controls");
  h_ = options_.h > 0.0 ? options_.h : 2.0 * std::sqrt(mesh.mean_area());
  source_radius_ = options_.source_radius < 0.0 ? 2.0 * h_ : options_.source_radius;
  const int n = mesh.size();
  max_sweeps_ = options_.max_sweeps > 0
                    ? options_.max_sweeps
                    : std::max(200, static_cast<int>(10.0 * std::sqrt(static_cast<double>(n))));

  const int c = options_.controls;
  feet_.resize(static_cast<size_t>(n) * c);
  dependents_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    validate_metric_at(metric, mesh.centroid(i));
    for (int k = 0; k < c; ++k) {
      const Foot f = locate_foot(i, theta_of(k, c));
      feet_[static_cast<size_t>(i) * c + k] = f;
      if (!f.inside) continue;
      for (int m = 0; m < 3; ++m)
        if (f.v[m] != i) dependents_[f.v[m]].push_back(i);
    }
  }
  for (auto& d : dependents_) {
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
  }
}

EikonalSolver::Foot EikonalSolver::locate_foot(int i, double theta) const {
  const Point2& x = mesh_->centroid(i);
  const Point2 foot = x - h_ * boundary_point(metric_, x, theta);
  Foot f;
  std::array<double, 3> lambda{};
  const int t = mesh_->locate_support(foot, &lambda);
  if (t < 0) return f;
  f.v = mesh_->support_triangles()[t];
  f.w = lambda;
  f.inside = true;
  return f;
}

double EikonalSolver::control_value(std::span<const double> U, int i, const Foot& f, bool implicit) const {
  if (!f.inside) return kUnreachable;
  double acc = 0.0, self = 0.0;
  for (int m = 0; m < 3; ++m) {
    const double w = f.w[m];
    if (std::abs(w) <= kWeightEps) continue;
    if (implicit && f.v[m] == i) {
      self += w;
      continue;
    }
    const double u = U[f.v[m]];
    if (u == kUnreachable) return kUnreachable;
    acc += w * u;
  }
  if (!implicit) return acc + h_;
  if (self >= 1.0 - 1e-12) return kUnreachable;
  return (acc + h_) / (1.0 - self);
}

double EikonalSolver::update(std::span<const double> U, int i, bool implicit) const {
  const int c = options_.controls;
  const Foot* feet = &feet_[static_cast<size_t>(i) * c];
  double best = kUnreachable;
  int best_k = -1;
  for (int k = 0; k < c; ++k) {
    const double v = control_value(U, i, feet[k], implicit);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  if (best_k < 0 || options_.refine_iters <= 0) return best;

  // Golden-section search on the bracket around the best sample.
  auto f = [&](double th) { return control_value(U, i, locate_foot(i, th), implicit); };
  double a = theta_of(best_k - 1, c), b = theta_of(best_k + 1, c);
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < options_.refine_iters; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  return std::min({best, f1, f2});
}

double EikonalSolver::sl_update(std::span<const double> U, int i) const { return update(U, i, false); }

int EikonalSolver::exterior_controls(int i) const {
  const int c = options_.controls;
  int count = 0;
  for (int k = 0; k < c; ++k) count += feet_[static_cast<size_t>(i) * c + k].inside ? 0 : 1;
  return count;
}

std::vector<double> EikonalSolver::initial_guess(const std::vector<int>& pinned,
                                                const std::vector<double>& pinned_values) const {
  const int n = mesh_->size();
  const int c = options_.controls;
  std::vector<char> is_pinned(n, 0);
  for (int p : pinned) is_pinned[p] = 1;

  // Nodes that reach the pinned set with probability one when the barycentric
  // weights of a foot simplex are read as transition probabilities. Alternate
  // between dropping controls that leave the candidate set and a backward
  // search from the pinned nodes until the set is stable.
  std::vector<char> in_set(n, 1);
  auto successors_ok = [&](const Foot& f) {
    if (!f.inside) return false;
    for (int m = 0; m < 3; ++m)
      if (std::abs(f.w[m]) > kWeightEps && !in_set[f.v[m]]) return false;
    return true;
  };
  while (true) {
    std::vector<char> reached(n, 0);
    std::vector<int> queue;
    for (int p : pinned) {
      reached[p] = 1;
      queue.push_back(p);
    }
    for (size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      for (int i : dependents_[v]) {
        if (reached[i] || !in_set[i]) continue;
        const Foot* feet = &feet_[static_cast<size_t>(i) * c];
        for (int k = 0; k < c; ++k) {
          const Foot& f = feet[k];
          if (!successors_ok(f)) continue;
          bool hits = false;
          for (int m = 0; m < 3; ++m) hits |= f.v[m] == v && std::abs(f.w[m]) > kWeightEps;
          if (hits) {
            reached[i] = 1;
            queue.push_back(i);
            break;
          }
        }
      }
    }
    bool changed = false;
    for (int i = 0; i < n; ++i)
      if (in_set[i] && !reached[i]) {
        in_set[i] = 0;
        changed = true;
      }
    if (!changed) break;
  }

  // Starting values: shortest paths along support edges, weighted by the
  // frozen-metric length of each edge. Any finite start converges; a close
  // one saves sweeps.
  std::vector<double> u(n, kUnreachable);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (size_t k = 0; k < pinned.size(); ++k) {
    u[pinned[k]] = pinned_values[k];
    heap.push({pinned_values[k], pinned[k]});
  }
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > u[v]) continue;
    const Point2& xv = mesh_->centroid(v);
    for (int j : mesh_->node_adjacency()[v]) {
      if (!in_set[j]) continue;
      const double nd = d + gauge(metric_, xv, mesh_->centroid(j) - xv);
      if (nd < u[j]) {
        u[j] = nd;
        heap.push({nd, j});
      }
    }
  }
  double fallback = 0.0;
  for (int i = 0; i < n; ++i)
    if (in_set[i] && u[i] != kUnreachable) fallback = std::max(fallback, u[i]);
  fallback += mesh_->diameter() / metric_.delta();
  for (int i = 0; i < n; ++i) {
    if (!in_set[i]) u[i] = kUnreachable;
    else if (u[i] == kUnreachable) u[i] = fallback;
  }
  return u;
}

DistanceField EikonalSolver::run_value_iteration(std::vector<int> pinned, std::vector<double> pinned_values,
                                                 std::vector<double> initial) const {
  const int n = mesh_->size();
  std::vector<double> u = initial_guess(pinned, pinned_values);
  if (!initial.empty())
    for (int i = 0; i < n; ++i)
      if (u[i] != kUnreachable && initial[i] != kUnreachable) u[i] = initial[i];
  std::vector<char> fixed(n, 0);
  for (size_t k = 0; k < pinned.size(); ++k) {
    u[pinned[k]] = pinned_values[k];
    fixed[pinned[k]] = 1;
  }
  DistanceField field;
  double change = kUnreachable;
  int sweep = 0;
  while (sweep < max_sweeps_) {
    ++sweep;
    change = 0.0;
    const bool forward = sweep % 2 == 1;
    for (int step = 0; step < n; ++step) {
      const int i = forward ? step : n - 1 - step;
      if (fixed[i] || u[i] == kUnreachable) continue;
      const double v = update(u, i, true);
      change = std::max(change, std::abs(v - u[i]));
      u[i] = v;
    }
    if (change < options_.tol) break;
  }
  if (!(change < options_.tol))
    throw ConvergenceError("value iteration did not converge in " + std::to_string(sweep) +
                               " sweeps (residual " + std::to_string(change) + ")",
                           change);
  field.values = std::move(u);
  field.residual = change;
  field.sweeps = sweep;
  return field;
}

DistanceField EikonalSolver::run_fast_marching(std::vector<int> pinned, std::vector<double> pinned_values) const {
  if (!metric_.is_isotropic())
    throw UnsupportedMetric("fast marching requires a euclidean or isotropic metric, got " + metric_.describe());
  const int n = mesh_->size();
  std::vector<double> accepted_values(n, kUnreachable);
  std::vector<double> tentative(n, kUnreachable);
  std::vector<char> accepted(n, 0), fixed(n, 0);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (size_t k = 0; k < pinned.size(); ++k) {
    tentative[pinned[k]] = pinned_values[k];
    fixed[pinned[k]] = 1;
    heap.push({pinned_values[k], pinned[k]});
  }
  while (!heap.empty()) {
    const auto [value, i] = heap.top();
    heap.pop();
    if (accepted[i] || value > tentative[i]) continue;
    accepted[i] = 1;
    accepted_values[i] = value;
    for (int j : dependents_[i]) {
      if (accepted[j] || fixed[j]) continue;
      const double v = update(accepted_values, j, true);
      if (v < tentative[j]) {
        tentative[j] = v;
        heap.push({v, j});
      }
    }
  }
  // Foot simplices of the support triangulation are not always causal, so the
  // one-pass values are an upper bound; Gauss-Seidel sweeps from there reach
  // the value-iteration fixed point, usually in a handful of sweeps.
  return run_value_iteration(std::move(pinned), std::move(pinned_values), std::move(accepted_values));
}

DistanceField EikonalSolver::solve_value_iteration(int source_index, double source_value) const {
  if (source_index < 0 || source_index >= mesh_->size()) throw InvalidArgument("source index out of range");
  // Solved with a zero boundary value and shifted afterwards, so that
  // solve(src, v) == solve(src, 0) + v holds bit for bit.
  auto [pinned, values] = source_ball(mesh_->centroid(source_index), source_index);
  DistanceField f = run_value_iteration(pinned, values);
  for (double& u : f.values) u += source_value;
  f.source_index = source_index;
  f.source_value = source_value;
  f.source_point = mesh_->centroid(source_index);
  f.metric_id = metric_.describe();
  return f;
}

DistanceField EikonalSolver::solve_fast_marching(int source_index, double source_value) const {
  if (source_index < 0 || source_index >= mesh_->size()) throw InvalidArgument("source index out of range");
  auto [pinned, values] = source_ball(mesh_->centroid(source_index), source_index);
  DistanceField f = run_fast_marching(pinned, values);
  for (double& u : f.values) u += source_value;
  f.source_index = source_index;
  f.source_value = source_value;
  f.source_point = mesh_->centroid(source_index);
  f.metric_id = metric_.describe();
  return f;
}

DistanceField EikonalSolver::solve(int source_index, double source_value, SolverKind kind) const {
  return kind == SolverKind::FastMarching ? solve_fast_marching(source_index, source_value)
                                          : solve_value_iteration(source_index, source_value);
}

std::pair<std::vector<int>, std::vector<double>> EikonalSolver::source_ball(const Point2& y, int anchor) const {
  std::vector<int> pinned;
  std::vector<double> values;
  if (anchor >= 0) {
    pinned.push_back(anchor);
    values.push_back(distance(mesh_->centroid(anchor), y) == 0.0 ? 0.0 : gauge(metric_, y, mesh_->centroid(anchor) - y));
  } else {
    std::array<double, 3> lambda{};
    const int t = mesh_->locate_support(y, &lambda);
    if (t >= 0) {
      for (int v : mesh_->support_triangles()[t]) {
        pinned.push_back(v);
        values.push_back(gauge(metric_, y, mesh_->centroid(v) - y));
      }
    } else {
      const int v = mesh_->nearest_node(y);
      pinned.push_back(v);
      values.push_back(gauge(metric_, y, mesh_->centroid(v) - y));
    }
  }
  // Nodes reached from y within source_radius take the exact frozen-metric
  // travel time.
  const double radius = source_radius_;
  if (radius > 0.0) {
    const Point2 lo{y.x - radius / metric_.delta(), y.y - radius / metric_.delta()};
    const Point2 hi{y.x + radius / metric_.delta(), y.y + radius / metric_.delta()};
    for (int i = 0; i < mesh_->size(); ++i) {
      const Point2& x = mesh_->centroid(i);
      if (x.x < lo.x || x.x > hi.x || x.y < lo.y || x.y > hi.y) continue;
      if (std::find(pinned.begin(), pinned.end(), i) != pinned.end()) continue;
      const double g = gauge(metric_, y, x - y);
      if (g <= radius && mesh_->segment_inside(y, x)) {
        pinned.push_back(i);
        values.push_back(g);
      }
    }
  }
  return {std::move(pinned), std::move(values)};
}

DistanceField EikonalSolver::solve_from_point(const Point2& y, SolverKind kind) const {
  auto [pinned, values] = source_ball(y, -1);
  DistanceField f = kind == SolverKind::FastMarching ? run_fast_marching(pinned, values)
                                                     : run_value_iteration(pinned, values);
  f.source_index = mesh_->nearest_node(y);
  f.source_value = 0.0;
  f.source_point = y;
  f.metric_id = metric_.describe();
  return f;
}

DistanceField solve_value_iteration(const Mesh& mesh, const MetricSpec& metric, int source_index,
                                    double source_value, const EikonalOptions& options) {
  return EikonalSolver(mesh, metric, options).solve_value_iteration(source_index, source_value);
}

DistanceField solve_fast_marching(const Mesh& mesh, const MetricSpec& metric, int source_index,
                                  double source_value, const EikonalOptions& options) {
  if (!metric.is_isotropic())
    throw UnsupportedMetric("fast marching requires a euclidean or isotropic metric, got " + metric.describe());
  return EikonalSolver(mesh, metric, options).solve_fast_marching(source_index, source_value);
}

Interpolated interpolate(const Mesh& mesh, std::span<const double> values, const Point2& p) {
  std::array<double, 3> lambda{};
  const int t = mesh.locate_support(p, &lambda);
  if (t < 0) return {values[mesh.nearest_node(p)], true};
  const auto& tri = mesh.support_triangles()[t];
  double acc = 0.0;
  for (int m = 0; m < 3; ++m) {
    if (std::abs(lambda[m]) <= kWeightEps) continue;
    const double u = values[tri[m]];
    if (u == kUnreachable) return {kUnreachable, false};
    acc += lambda[m] * u;
  }
  return {acc, false};
}

std::vector<Point2> backtrack_geodesic(const Mesh& mesh, const MetricSpec& metric, const DistanceField& field,
                                       const Point2& start, double step, int controls) {
  if (!(step > 0.0)) throw InvalidArgument("backtracking step must be positive");
  const Point2 source = field.source_point;
  if (distance(start, source) <= 1e-12) return {};
  std::vector<Point2> path{start};
  Point2 x = start;
  double best_seen = interpolate(mesh, field.values, x).value;
  int stalled = 0;
  const int max_steps = static_cast<int>(8.0 * mesh.diameter() / (step * metric.delta())) + 100;
  for (int it = 0; it < max_steps; ++it) {
    if (distance(x, source) <= step) {
      path.push_back(source);
      return path;
    }
    double best = kUnreachable;
    Point2 next{};
    for (int k = 0; k < controls; ++k) {
      const Point2 foot = x - step * boundary_point(metric, x, theta_of(k, controls));
      std::array<double, 3> lambda{};
      const int t = mesh.locate_support(foot, &lambda);
      if (t < 0) continue;
      const auto& tri = mesh.support_triangles()[t];
      double v = 0.0;
      for (int m = 0; m < 3; ++m) {
        if (std::abs(lambda[m]) <= kWeightEps) continue;
        v += lambda[m] * field.values[tri[m]];
      }
      if (v < best) {
        best = v;
        next = foot;
      }
    }
    if (best == kUnreachable) throw BacktrackError("backtracking left the domain");
    x = next;
    path.push_back(x);
    if (best < best_seen) {
      best_seen = best;
      stalled = 0;
    } else if (++stalled >= 5) {
      throw BacktrackError("backtracking made no progress for 5 steps");
    }
  }
  throw BacktrackError("backtracking exceeded its step budget");
}

}  // namespace geotess
