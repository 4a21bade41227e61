// Quadrature rules on the unit reference simplex
//   dim=1: [0,1],  dim=2: {x,y>=0, x+y<=1},  dim=3: {x,y,z>=0, x+y+z<=1}.
// All rules have positive weights. Low 2D degrees use classical symmetric
// rules with exact coefficients; everything else is a conical-product
// Gauss-Jacobi rule, so arbitrary degrees stay available.
#pragma once

#include "movefem/common.hpp"

namespace movefem {

template <int dim>
struct QuadratureRule {
  std::vector<Vec<dim>> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  int size() const { return static_cast<int>(points.size()); }
  double weight_sum() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }
};

template <int dim>
constexpr double reference_simplex_measure() {
  if constexpr (dim == 1) return 1.0;
  if constexpr (dim == 2) return 0.5;
  return 1.0 / 6.0;
}

// Rule with exactness_degree >= degree. Throws Error for degree < 1 or above
// the supported maximum (20).
template <int dim>
QuadratureRule<dim> quadrature_for(int degree);

// Gauss-Legendre on [0,1] (weight 1) and Gauss-Jacobi on [0,1] with weight
// (1-t)^alpha; n points integrate degree <= 2n-1 exactly.
QuadratureRule<1> gauss_legendre_01(int n);
QuadratureRule<1> gauss_jacobi_01(int n, int alpha);

}  // namespace movefem
