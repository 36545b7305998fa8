#include "geotess/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "geotess/errors.hpp"
#include "geotess/summation.hpp"

namespace geotess {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PowerState {
  std::vector<int> labels;
  std::vector<double> pi;
  double F = 0.0;
  double gap = 0.0;
  double l1 = 0.0;
};

void gauge_fix(std::vector<double>& w) {
  if (w.empty()) return;
  const double m = *std::min_element(w.begin(), w.end());
  for (double& v : w) v -= m;
}

PowerState evaluate(const Mesh& mesh, const DensityField& density, std::span<const DistanceField> base,
                    std::span<const double> c, std::span<const double> w) {
  const int K = static_cast<int>(base.size());
  const int N = mesh.size();
  PowerState s;
  s.labels.assign(N, -1);
  std::vector<CompensatedSum> pi(K);
  CompensatedSum F;
  for (int i = 0; i < N; ++i) {
    double best = kInf;
    int arg = -1;
    for (int k = 0; k < K; ++k) {
      const double u = base[k].values[i];
      if (u == kInf) continue;
      const double v = u - w[k];
      if (v < best) {
        best = v;
        arg = k;
      }
    }
    if (arg < 0) throw UnreachableNode("node " + std::to_string(i) + " is unreachable from every generator", i);
    s.labels[i] = arg;
    const double m = node_mass(mesh, density, i);
    pi[arg] += m;
    F += m * best;
  }
  s.pi.resize(K);
  for (int k = 0; k < K; ++k) {
    s.pi[k] = pi[k].value();
    F += w[k] * c[k];
    const double d = std::abs(s.pi[k] - c[k]);
    s.gap = std::max(s.gap, d);
    s.l1 += d;
  }
  s.F = F.value();
  return s;
}

// Value of w_k placing cell k's mass closest to c_k with the other weights
// fixed; returns w_k unchanged when no threshold interval is usable.
double threshold_weight(const Mesh& mesh, const DensityField& density, std::span<const DistanceField> base,
                        std::span<const double> c, std::span<const double> w, int k, double margin) {
  const int K = static_cast<int>(base.size());
  struct Item {
    double t;
    double m;
  };
  std::vector<Item> items;
  double always = 0.0;  // nodes only k reaches
  for (int i = 0; i < mesh.size(); ++i) {
    const double uk = base[k].values[i];
    if (uk == kInf) continue;
    double other = kInf;
    for (int j = 0; j < K; ++j)
      if (j != k && base[j].values[i] != kInf) other = std::min(other, base[j].values[i] - w[j]);
    const double m = node_mass(mesh, density, i);
    if (other == kInf) {
      always += m;
      continue;
    }
    items.push_back({uk - other, m});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.t < b.t; });
  // Cell k holds the first j items when w_k lies in (t_{j-1}, t_j).
  const int n = static_cast<int>(items.size());
  double best_err = kInf;
  double best_w = w[k];
  double cum = always;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) cum += items[j - 1].m;
    const double lo = j > 0 ? items[j - 1].t : -kInf;
    const double hi = j < n ? items[j].t : kInf;
    if (!(hi > lo)) continue;
    const double err = std::abs(cum - c[k]);
    if (err < best_err) {
      best_err = err;
      if (lo == -kInf && hi == kInf) best_w = w[k];
      else if (lo == -kInf) best_w = hi - margin;
      else if (hi == kInf) best_w = lo + margin;
      else best_w = 0.5 * (lo + hi);
    }
  }
  return best_w;
}

}  // namespace

void validate_capacities(std::span<const double> c, int K) {
  if (static_cast<int>(c.size()) != K)
    throw InvalidArgument("expected " + std::to_string(K) + " capacities, got " + std::to_string(c.size()));
  CompensatedSum s;
  for (double v : c) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("capacities must be positive and finite");
    s += v;
  }
  if (std::abs(s.value() - 1.0) > 1e-9)
    throw InvalidArgument("capacities must sum to the total mass 1, got " + std::to_string(s.value()));
}

std::vector<DistanceField> shift_fields(std::span<const DistanceField> base, std::span<const double> w) {
  if (w.size() != base.size()) throw InvalidArgument("one weight per field required");
  std::vector<DistanceField> out(base.begin(), base.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (w[k] == 0.0) continue;
    for (double& v : out[k].values)
      if (v != kInf) v -= w[k];
    out[k].source_value -= w[k];
  }
  return out;
}

std::vector<double> capacities(const Mesh& mesh, const DensityField& density, std::span<const int> labels, int K) {
  if (static_cast<int>(labels.size()) != mesh.size()) throw InvalidArgument("one label per triangle required");
  std::vector<CompensatedSum> pi(K);
  for (int i = 0; i < mesh.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= K) throw InvalidArgument("label out of range at triangle " + std::to_string(i));
    pi[labels[i]] += node_mass(mesh, density, i);
  }
  std::vector<double> out(K);
  for (int k = 0; k < K; ++k) out[k] = pi[k].value();
  return out;
}

double dual_objective(const Mesh& mesh, const DensityField& density, std::span<const DistanceField> base,
                      std::span<const double> c, std::span<const double> w) {
  if (c.size() != base.size() || w.size() != base.size()) throw InvalidArgument("one capacity and weight per field");
  return evaluate(mesh, density, base, c, w).F;
}

WeightResult optimize_weights(std::span<const DistanceField> base, const Mesh& mesh, const DensityField& density,
                              std::span<const double> c, const WeightOptions& options, std::span<const double> w0) {
  const int K = static_cast<int>(base.size());
  if (K == 0) throw InvalidArgument("no fields");
  validate_capacities(c, K);
  for (const auto& f : base)
    if (f.size() != mesh.size()) throw InvalidArgument("field size does not match the mesh");
  const double tol = options.tol_cap > 0.0 ? options.tol_cap : 0.01 * *std::min_element(c.begin(), c.end());
  const Point2 span = mesh.bbox_max() - mesh.bbox_min();
  const double eta0 = options.eta0 > 0.0 ? options.eta0 : norm(span);
  const double margin = std::sqrt(mesh.mean_area());
  const double eta_floor = 1e-12 * norm(span);

  std::vector<double> w(K, 0.0);
  if (!w0.empty()) {
    if (static_cast<int>(w0.size()) != K) throw InvalidArgument("w0 must have one entry per field");
    w.assign(w0.begin(), w0.end());
  }
  gauge_fix(w);
  PowerState st = evaluate(mesh, density, base, c, w);

  WeightResult res;
  res.objective.push_back(st.F);
  std::vector<double> best_w = w;
  PowerState best = st;
  auto record_best = [&] {
    if (st.gap < best.gap) {
      best = st;
      best_w = w;
    }
  };

  double eta = eta0;
  int since_best = 0;
  int budget = options.max_ascent;
  while (st.gap > tol && budget > 0) {
    const double prev_gap = best.gap;
    bool refine = eta < eta_floor || since_best > 2 * K + 20;
    if (!refine) {
      std::vector<double> trial(K);
      for (int k = 0; k < K; ++k) trial[k] = w[k] + eta * (c[k] - st.pi[k]);
      gauge_fix(trial);
      PowerState ts = evaluate(mesh, density, base, c, trial);
      if (ts.F > st.F) {
        w = std::move(trial);
        st = std::move(ts);
        eta *= 2.0;
        ++res.steps;
        ++res.ascent_steps;
        --budget;
        res.objective.push_back(st.F);
        record_best();
      } else {
        eta *= 0.5;
      }
      since_best = best.gap < prev_gap ? 0 : since_best + 1;
      continue;
    }
    if (!options.coordinate_refine) break;
    // Threshold pass, worst cell first; a move is kept when the total
    // absolute capacity error does not grow.
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(st.pi[a] - c[a]) > std::abs(st.pi[b] - c[b]);
    });
    bool moved = false;
    for (int k : order) {
      if (budget <= 0 || st.gap <= tol) break;
      std::vector<double> trial = w;
      trial[k] = threshold_weight(mesh, density, base, c, w, k, margin);
      if (trial[k] == w[k]) continue;
      gauge_fix(trial);
      PowerState ts = evaluate(mesh, density, base, c, trial);
      if (ts.labels == st.labels || ts.l1 > st.l1 + 1e-15) continue;
      w = std::move(trial);
      st = std::move(ts);
      ++res.steps;
      --budget;
      moved = true;
      record_best();
    }
    if (!moved) break;
    eta = eta0;
    since_best = 0;
  }

  res.weights = best_w;
  res.capacities = best.pi;
  res.labels = best.labels;
  res.gap = best.gap;
  if (best.gap > tol)
    throw CapacityError("capacity gap " + std::to_string(best.gap) + " above tolerance " + std::to_string(tol),
                        best_w, best.gap);
  return res;
}

Tessellation run_capacity_cvt(const Mesh& mesh, const MetricSpec& metric, const DensityField& density,
                              std::span<const Point2> mu0, std::span<const double> c, const PowerConfig& config_in) {
  detail::validate_generators(mesh, mu0);
  const int K = static_cast<int>(mu0.size());
  validate_capacities(c, K);
  const LloydConfig config = detail::resolve(mesh, config_in.lloyd);
  const EikonalSolver solver(mesh, metric, config.eikonal);

  Tessellation t;
  t.K = K;
  t.mu.assign(mu0.begin(), mu0.end());
  t.weights.assign(K, 0.0);
  if (!config_in.w0.empty()) {
    if (static_cast<int>(config_in.w0.size()) != K) throw InvalidArgument("w0 must have one entry per generator");
    t.weights = config_in.w0;
    gauge_fix(t.weights);
  }

  // Best weights for the given base fields; a missed tolerance is logged and
  // the best-so-far weights are used.
  auto weights_for = [&](std::span<const DistanceField> base, int n) {
    try {
      return optimize_weights(base, mesh, density, c, config_in.weights, t.weights).weights;
    } catch (const CapacityError& e) {
      t.log.push_back("iteration " + std::to_string(n) + ": " + e.what());
      return e.weights();
    }
  };

  std::vector<Point2> prev_mu;
  std::vector<double> prev_w;
  for (int n = 0;; ++n) {
    const std::vector<DistanceField> base = detail::solve_all(solver, t.mu, config);
    t.fields = shift_fields(base, t.weights);
    t.labels = assign_cells(t.fields);

    IterationRecord rec;
    rec.mu = t.mu;
    rec.weights = t.weights;
    rec.capacities = capacities(mesh, density, t.labels, K);
    rec.energy_squared = kmeans_energy(mesh, density, t, EnergyMode::Squared);
    rec.energy_unsquared = kmeans_energy(mesh, density, t, EnergyMode::Unsquared);
    for (int k = 0; k < K; ++k) rec.empty_cells += rec.capacities[k] > 0.0 ? 0 : 1;
    if (!prev_mu.empty()) {
      rec.displacement = detail::max_displacement(t.mu, prev_mu);
      for (int k = 0; k < K; ++k) rec.weight_change = std::max(rec.weight_change, std::abs(t.weights[k] - prev_w[k]));
    }
    t.history.push_back(rec);

    if (!prev_mu.empty() && std::max(rec.displacement, rec.weight_change) < config.eps) {
      t.converged = true;
      break;
    }
    if (n >= config.max_outer) {
      t.log.push_back("stopped at max_outer = " + std::to_string(config.max_outer) + " without convergence");
      break;
    }
    prev_mu = t.mu;
    prev_w = t.weights;
    if (rec.empty_cells == 0) {
      t.mu = detail::update_centroids(solver, density, t.labels, t.mu, base, config, t.log);
    } else {
      t.log.push_back("iteration " + std::to_string(n) + ": " + std::to_string(rec.empty_cells) +
                      " empty cell(s), generators kept");
    }
    t.weights = weights_for(base, n);
  }

  // Final weights for the fields at the returned generators.
  const std::vector<DistanceField> base = detail::solve_all(solver, t.mu, config);
  t.weights = weights_for(base, static_cast<int>(t.history.size()));
  t.fields = shift_fields(base, t.weights);
  t.labels = assign_cells(t.fields);
  const std::vector<double> pi = capacities(mesh, density, t.labels, K);
  t.capacities = pi;
  const double tol =
      config_in.weights.tol_cap > 0.0 ? config_in.weights.tol_cap : 0.01 * *std::min_element(c.begin(), c.end());
  double gap = 0.0;
  for (int k = 0; k < K; ++k) {
    gap = std::max(gap, std::abs(pi[k] - c[k]));
    if (!(pi[k] > 0.0)) {
      t.infeasible = true;
      t.log.push_back("cell " + std::to_string(k) + " is empty at the final weights (capacity " +
                      std::to_string(c[k]) + ")");
    }
  }
  if (gap > tol) {
    t.infeasible = true;
    t.log.push_back("final capacity gap " + std::to_string(gap) + " above tolerance " + std::to_string(tol));
  }
  return t;
}

}  // namespace geotess
