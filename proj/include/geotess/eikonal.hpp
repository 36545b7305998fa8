#pragma once

#include <array>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "geotess/geometry.hpp"
#include "geotess/mesh.hpp"
#include "geotess/metric.hpp"

namespace geotess {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

enum class SolverKind { ValueIteration, FastMarching };

SolverKind parse_solver_kind(const std::string& name);
std::string to_string(SolverKind kind);

struct EikonalOptions {
  double tol = 1e-9;       ///< sup-norm change that ends value iteration
  double h = 0.0;          ///< pseudo-time step; <= 0 selects 2 sqrt(mean area)
  int controls = 32;       ///< boundary samples of C(x) per node
  int refine_iters = 0;    ///< golden-section steps on the best angular bracket (0 = off; see README)
  int max_sweeps = 0;      ///< <= 0 selects max(200, 10 sqrt(N))
  double source_radius = -1.0;  ///< nodes within this travel time of the source take the exact value (< 0 selects 2h, 0 = off)
};

/// Values of one eikonal solve on the centroid nodes. Unreachable nodes hold
/// +infinity.
struct DistanceField {
  std::vector<double> values;
  int source_index = -1;     ///< node pinned to source_value (nearest node for point sources)
  double source_value = 0.0;
  Point2 source_point{};     ///< location of the source
  std::string metric_id;
  double residual = 0.0;     ///< last sup-norm update
  int sweeps = 0;            ///< Gauss-Seidel sweeps (correction sweeps after fast marching)

  double operator[](int i) const { return values[i]; }
  int size() const { return static_cast<int>(values.size()); }
};

/// Semi-Lagrangian discretisation of H(x, Du) = 1 on the centroid nodes:
///
///   U_i = min_{q in boundary C(X_i)} I[U](X_i - h q) + h
///
/// with I the piecewise-linear interpolant on the centroid support
/// triangulation. The running cost is h because the Legendre transform of a
/// support function vanishes on C(x). Foot points of the sampled controls are
/// located once at construction, so a solver should be reused across sources.
class EikonalSolver {
 public:
  /// Keeps a reference to the mesh and a copy of the metric.
  EikonalSolver(const Mesh& mesh, const MetricSpec& metric, EikonalOptions options = {});
  EikonalSolver(Mesh&&, const MetricSpec&, EikonalOptions = {}) = delete;

  const Mesh& mesh() const { return *mesh_; }
  const MetricSpec& metric() const { return metric_; }
  const EikonalOptions& options() const { return options_; }
  double h() const { return h_; }

  /// Gauss-Seidel value iteration alternating forward/backward node order.
  /// Throws ConvergenceError after max_sweeps.
  DistanceField solve_value_iteration(int source_index, double source_value = 0.0) const;

  /// Single-pass causal solve (Dijkstra ordering with the same local update
  /// restricted to accepted nodes). Throws UnsupportedMetric for anisotropic metrics.
  DistanceField solve_fast_marching(int source_index, double source_value = 0.0) const;

  DistanceField solve(int source_index, double source_value, SolverKind kind) const;

  /// Source at an arbitrary point y: the nodes of the support triangle holding
  /// y (or the nearest node outside the support) are pinned to the frozen-metric
  /// gauge distance from y. Used where sub-node resolution in y matters.
  DistanceField solve_from_point(const Point2& y, SolverKind kind) const;

  /// One explicit application of the scheme at node i, using U_i as stored.
  /// Returns +inf when no control has an interior foot point with finite data.
  double sl_update(std::span<const double> U, int i) const;

  /// Number of node i's sampled controls whose foot point left the support.
  int exterior_controls(int i) const;

 private:
  struct Foot {
    std::array<int, 3> v{-1, -1, -1};
    std::array<double, 3> w{};
    bool inside = false;
  };

  double control_value(std::span<const double> U, int i, const Foot& f, bool implicit) const;
  Foot locate_foot(int i, double theta) const;
  double update(std::span<const double> U, int i, bool implicit) const;
  std::vector<double> initial_guess(const std::vector<int>& pinned, const std::vector<double>& pinned_values) const;
  std::pair<std::vector<int>, std::vector<double>> source_ball(const Point2& y, int anchor) const;

  DistanceField run_value_iteration(std::vector<int> pinned, std::vector<double> pinned_values,
                                    std::vector<double> initial = {}) const;
  DistanceField run_fast_marching(std::vector<int> pinned, std::vector<double> pinned_values) const;

  const Mesh* mesh_;
  MetricSpec metric_;
  EikonalOptions options_;
  double h_;
  double source_radius_;
  int max_sweeps_;
  std::vector<Foot> feet_;                  // node-major, options_.controls per node
  std::vector<std::vector<int>> dependents_;  // nodes whose stencils read a given node
};

/// Free-function forms.
DistanceField solve_value_iteration(const Mesh& mesh, const MetricSpec& metric, int source_index,
                                    double source_value, const EikonalOptions& options = {});
DistanceField solve_fast_marching(const Mesh& mesh, const MetricSpec& metric, int source_index,
                                  double source_value, const EikonalOptions& options = {});

struct Interpolated {
  double value = kUnreachable;
  bool fallback = false;  ///< point outside the support; nearest-node value used
};

/// Barycentric-linear interpolation of node values on the centroid support.
Interpolated interpolate(const Mesh& mesh, std::span<const double> values, const Point2& p);

/// Steepest descent of the field from `start` to the field's source:
/// x <- x - step * argmin_{q in boundary C(x)} I[U](x - step q). The path
/// starts at `start` and ends at the source point; it is empty when start is
/// the source. Throws BacktrackError if U fails to decrease for 5 steps or no
/// control lands inside the domain.
std::vector<Point2> backtrack_geodesic(const Mesh& mesh, const MetricSpec& metric, const DistanceField& field,
                                       const Point2& start, double step, int controls = 32);

}  // namespace geotess
