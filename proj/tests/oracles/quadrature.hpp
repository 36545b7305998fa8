#pragma once

// Tensor Gauss-Legendre quadrature of the mean distance to the centre of the
// unit square, on an n x n grid of sub-squares with 4 x 4 points each.

#include <cmath>

namespace oracle {

inline double mean_distance_to_centre(int n) {
  const double g[2] = {0.3399810435848563, 0.8611363115940526};
  const double w[2] = {0.6521451548625461, 0.3478548451374538};
  double nodes[4], weights[4];
  for (int k = 0; k < 2; ++k) {
    nodes[2 * k] = -g[k];
    nodes[2 * k + 1] = g[k];
    weights[2 * k] = weights[2 * k + 1] = w[k];
  }
  const double hcell = 1.0 / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double x = (i + 0.5 + 0.5 * nodes[a]) * hcell - 0.5;
          const double y = (j + 0.5 + 0.5 * nodes[b]) * hcell - 0.5;
          sum += weights[a] * weights[b] * 0.25 * hcell * hcell * std::hypot(x, y);
        }
  return sum;
}

}  // namespace oracle
