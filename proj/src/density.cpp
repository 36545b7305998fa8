#include "geotess/density.hpp"

#include <cmath>

#include "geotess/errors.hpp"
#include "geotess/summation.hpp"

namespace geotess {

DensityField build_density(const Mesh& mesh, const DensitySpec& spec) {
  const int n = mesh.size();
  DensityField field;
  field.spec = spec;
  field.rho.resize(n);
  switch (spec.kind) {
    case DensitySpec::Kind::Uniform:
      for (auto& r : field.rho) r = 1.0;
      break;
    case DensitySpec::Kind::Gaussian: {
      const Sym2& c = spec.covariance;
      if (!(c.xx > 0.0) || !(c.det() > 0.0)) throw InvalidDensity("gaussian covariance must be SPD");
      const Sym2 inv = c.inverse();
      for (int i = 0; i < n; ++i) field.rho[i] = std::exp(-0.5 * inv.quad(mesh.centroid(i) - spec.center));
      break;
    }
    case DensitySpec::Kind::Table:
      if (static_cast<int>(spec.table.size()) != n)
        throw InvalidDensity("density table has " + std::to_string(spec.table.size()) + " values for " +
                             std::to_string(n) + " triangles");
      for (int i = 0; i < n; ++i) {
        const double v = spec.table[i];
        if (!std::isfinite(v) || v < 0.0)
          throw InvalidDensity("density table value " + std::to_string(i) + " is negative or non-finite");
        field.rho[i] = v;
      }
      break;
  }
  CompensatedSum mass;
  for (int i = 0; i < n; ++i) mass += mesh.area(i) * field.rho[i];
  const double m = mass.value();
  if (!(m > 0.0)) throw InvalidDensity("density has zero mass on the mesh");
  for (auto& r : field.rho) r /= m;
  return field;
}

}  // namespace geotess
