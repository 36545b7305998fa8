#pragma once

#include <span>
#include <string>
#include <vector>

#include "geotess/density.hpp"
#include "geotess/eikonal.hpp"
#include "geotess/mesh.hpp"
#include "geotess/metric.hpp"

namespace geotess {

enum class EnergyMode { Squared, Unsquared };

EnergyMode parse_energy_mode(const std::string& name);
std::string to_string(EnergyMode mode);

struct LloydConfig {
  double eps = 0.0;        ///< outer stop on max generator displacement; <= 0 selects max_area / 10
  double eps_c = 0.0;      ///< geodesic-centroid step tolerance; <= 0 selects 0.25 sqrt(mean area)
  int max_outer = 100;
  SolverKind solver = SolverKind::ValueIteration;
  EnergyMode energy_mode = EnergyMode::Unsquared;
  EikonalOptions eikonal{};
  int threads = 1;                ///< workers for the K independent solves
  int line_search_candidates = 12;
  int max_descent_steps = 40;     ///< accepted steps per geodesic centroid
  bool point_sources = true;      ///< solve from the generator itself instead of its nearest node
  bool monotone_update = true;    ///< reject a closed-form mean that raises the cell cost
};

struct IterationRecord {
  std::vector<Point2> mu;            ///< generators the fields of this iteration were solved from
  double energy_squared = 0.0;
  double energy_unsquared = 0.0;
  double displacement = 0.0;         ///< max |mu^n - mu^{n-1}| (0 for the first record)
  std::vector<double> weights;       ///< power diagrams only
  std::vector<double> capacities;    ///< cell masses under the labels of this iteration
  double weight_change = 0.0;        ///< max |w^n - w^{n-1}| (power diagrams only)
  int empty_cells = 0;
};

struct Tessellation {
  int K = 0;
  std::vector<Point2> mu;
  std::vector<int> labels;            ///< 0-based cell index per triangle
  std::vector<DistanceField> fields;  ///< one per generator, shifted by -weights
  std::vector<double> weights;        ///< zero for plain Voronoi tessellations
  std::vector<double> capacities;     ///< cell masses under the final labels
  std::vector<IterationRecord> history;
  bool converged = false;
  bool infeasible = false;            ///< power diagrams: capacity gap left above tolerance
  std::vector<std::string> log;
};

/// Generator-side nodes: index of the centroid nearest to each point.
std::vector<int> source_nodes(const Mesh& mesh, std::span<const Point2> mu);

/// Per-triangle argmin over the fields, smallest cell index on ties. Throws
/// UnreachableNode when every field is +inf at some triangle.
std::vector<int> assign_cells(std::span<const DistanceField> fields);

/// Mass-weighted mean of the centroids in cell k; throws EmptyCell when the
/// cell has no mass.
Point2 euclidean_centroid(const Mesh& mesh, const DensityField& density, std::span<const int> labels, int k);

/// Sum over cell k of |T_i| rho(X_i) (U_i - source_value)^p, p = 1 or 2.
double cell_energy(const Mesh& mesh, const DensityField& density, const DistanceField& field,
                   std::span<const int> labels, int k, EnergyMode mode);

double kmeans_energy(const Mesh& mesh, const DensityField& density, const Tessellation& t, EnergyMode mode);

struct CentroidResult {
  Point2 point{};
  bool stalled = false;
  int steps = 0;    ///< accepted descent steps
  int solves = 0;   ///< eikonal solves spent
  double initial_objective = 0.0;
  double objective = 0.0;  ///< H at the returned point
};

/// Descent on H(z) = sum_{j in cell k} |T_j| rho(X_j) d_C(z, X_j) (d_C^2 in
/// squared mode). Each step searches along the mass-weighted sum of gauge
/// gradients at the backtracked departure directions; if that yields no
/// decrease, along a central-difference gradient of H. One point-source
/// solve per candidate.
/// Candidates whose nearest node lies outside the cell are moved to the
/// nearest in-cell node.
CentroidResult geodesic_centroid(const EikonalSolver& solver, const DensityField& density,
                                 std::span<const int> labels, int k, Point2 init, double eps_c,
                                 const LloydConfig& config = {}, const DistanceField* init_field = nullptr);

/// Lloyd iteration: solve K fields from nearest nodes, assign, move each
/// generator to its cell centroid, stop when the displacement drops below eps.
Tessellation run_cvt(const Mesh& mesh, const MetricSpec& metric, const DensityField& density,
                     std::span<const Point2> mu0, const LloydConfig& config = {});

// Helpers shared with the power module.
namespace detail {
LloydConfig resolve(const Mesh& mesh, LloydConfig config);
std::vector<DistanceField> solve_all(const EikonalSolver& solver, std::span<const Point2> mu,
                                     const LloydConfig& config);
std::vector<Point2> update_centroids(const EikonalSolver& solver, const DensityField& density,
                                     std::span<const int> labels, std::span<const Point2> mu,
                                     std::span<const DistanceField> fields, const LloydConfig& config,
                                     std::vector<std::string>& log);
double max_displacement(std::span<const Point2> a, std::span<const Point2> b);
void validate_generators(const Mesh& mesh, std::span<const Point2> mu0);
}  // namespace detail

}  // namespace geotess
