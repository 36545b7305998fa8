#pragma once

#include <span>
#include <vector>

#include "geotess/geometry.hpp"
#include "geotess/mesh.hpp"

namespace geotess {

struct DensitySpec {
  enum class Kind { Uniform, Gaussian, Table };
  Kind kind = Kind::Uniform;
  Point2 center{};       ///< Gaussian mean
  Sym2 covariance{};     ///< Gaussian covariance, must be SPD
  std::vector<double> table;  ///< Table: one raw value per triangle

  static DensitySpec uniform() { return {}; }
  static DensitySpec gaussian(Point2 c, Sym2 cov) { return {Kind::Gaussian, c, cov, {}}; }
  static DensitySpec from_table(std::vector<double> values) { return {Kind::Table, {}, {}, std::move(values)}; }
};

/// Density sampled at triangle centroids and normalised to unit discrete mass.
struct DensityField {
  std::vector<double> rho;
  DensitySpec spec;

  double operator[](int i) const { return rho[i]; }
  int size() const { return static_cast<int>(rho.size()); }
};

/// Throws InvalidDensity for negative/non-finite table values, a non-SPD
/// covariance, a wrong table length, or zero total mass.
DensityField build_density(const Mesh& mesh, const DensitySpec& spec);

/// |T_i| rho(X_i), the one-point quadrature weight of triangle i.
inline double node_mass(const Mesh& mesh, const DensityField& density, int i) {
  return mesh.area(i) * density.rho[i];
}

/// Sum over `subset` (index order, compensated) of |T_i| rho(X_i) f(X_i).
template <class F>
double integrate(const Mesh& mesh, const DensityField& density, std::span<const int> subset, F&& f);

/// Integral over the whole mesh.
template <class F>
double integrate(const Mesh& mesh, const DensityField& density, F&& f);

}  // namespace geotess

#include "geotess/summation.hpp"

namespace geotess {

template <class F>
double integrate(const Mesh& mesh, const DensityField& density, std::span<const int> subset, F&& f) {
  CompensatedSum s;
  for (int i : subset) s += node_mass(mesh, density, i) * f(mesh.centroid(i));
  return s.value();
}

template <class F>
double integrate(const Mesh& mesh, const DensityField& density, F&& f) {
  CompensatedSum s;
  for (int i = 0; i < mesh.size(); ++i) s += node_mass(mesh, density, i) * f(mesh.centroid(i));
  return s.value();
}

}  // namespace geotess
