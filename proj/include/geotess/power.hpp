#pragma once

#include <span>
#include <vector>

#include "geotess/density.hpp"
#include "geotess/eikonal.hpp"
#include "geotess/mesh.hpp"
#include "geotess/metric.hpp"
#include "geotess/tessellation.hpp"

namespace geotess {

/// Throws InvalidArgument unless c has K positive entries summing to the
/// discrete total mass (1) within 1e-9.
void validate_capacities(std::span<const double> c, int K);

/// Fields U^k - w_k. Exact by shift covariance, no re-solve; source_value
/// moves with the shift so cell energies still see the unshifted distance.
std::vector<DistanceField> shift_fields(std::span<const DistanceField> base, std::span<const double> w);

/// pi_k = sum over label k of |T_i| rho(X_i).
std::vector<double> capacities(const Mesh& mesh, const DensityField& density, std::span<const int> labels, int K);

/// Discrete dual F(w) = sum_i m_i min_k (U^k_i - w_k) + sum_k w_k c_k, with
/// base fields solved at source value 0. Concave, piecewise linear, with
/// supergradient c - pi(w).
double dual_objective(const Mesh& mesh, const DensityField& density, std::span<const DistanceField> base,
                      std::span<const double> c, std::span<const double> w);

struct WeightOptions {
  double tol_cap = 0.0;   ///< capacity gap target; <= 0 selects 0.01 min_k c_k
  int max_ascent = 500;   ///< ascent plus coordinate steps
  double eta0 = 0.0;      ///< initial step; <= 0 selects the bounding-box diagonal
  bool coordinate_refine = true;  ///< per-weight threshold search once the step size collapses
};

struct WeightResult {
  std::vector<double> weights;      ///< gauge fixed, min_k w_k = 0
  std::vector<double> capacities;
  std::vector<int> labels;
  double gap = 0.0;                 ///< max_k |pi_k - c_k|
  int steps = 0;                    ///< accepted updates
  int ascent_steps = 0;             ///< of which supergradient steps
  std::vector<double> objective;    ///< F after each accepted supergradient step, starting with F(w0)
};

/// Supergradient ascent w <- w + eta (c - pi(w)), eta doubled after an
/// increase of F and halved (step rejected) otherwise. When eta no longer
/// moves any label, single weights are set exactly: w_k is placed midway
/// between the two label-flip thresholds whose cell mass is closest to c_k.
/// Throws CapacityError carrying the best weights when tol_cap is not reached.
WeightResult optimize_weights(std::span<const DistanceField> base, const Mesh& mesh, const DensityField& density,
                              std::span<const double> c, const WeightOptions& options = {},
                              std::span<const double> w0 = {});

struct PowerConfig {
  LloydConfig lloyd{};
  WeightOptions weights{};
  std::vector<double> w0;  ///< empty selects zeros
};

/// Capacity-constrained Lloyd iteration. Per outer step: solve base fields at
/// mu and assign with the previous weights, move generators to the centroids
/// of those cells, then re-optimise the weights on the base fields. Stops when
/// max(|dmu|, |dw|) < eps; the returned fields, labels and weights come from a
/// final solve at the last generators.
Tessellation run_capacity_cvt(const Mesh& mesh, const MetricSpec& metric, const DensityField& density,
                              std::span<const Point2> mu0, std::span<const double> c, const PowerConfig& config = {});

}  // namespace geotess
