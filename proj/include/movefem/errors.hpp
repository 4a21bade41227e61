// Error norms against an exact solution and experimental convergence orders.
#pragma once

#include "movefem/fe_space.hpp"
#include "movefem/manufactured.hpp"

#include <cmath>

namespace movefem {

struct ErrorNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double h1_norm = 0.0;
};

// Quadrature of |u - U^h|^2 and |grad u - grad U^h|^2 over the discrete
// domain at the frame's time. The exact solution is evaluated at the discrete
// quadrature points by default; lifted_eval moves the evaluation point onto
// the exact domain (sensitivity switch).
template <int dim>
ErrorNorms compute_errors(const FESpace<dim>& sp, const MeshFrame<dim>& frame, const Vector& U,
                          const std::function<double(double, const Vec<dim>&)>& u,
                          const std::function<Vec<dim>(double, const Vec<dim>&)>& grad_u,
                          const LevelSetGeometry<dim>* geom = nullptr, bool lifted_eval = false,
                          int quad_degree = -1) {
  if (quad_degree < 0) quad_degree = 2 * sp.order + 2;
  if (lifted_eval && !geom) throw Error("compute_errors: lifted evaluation needs the geometry");
  const CurvedMesh<dim>& cm = *frame.mesh;
  const double t = frame.time;
  const int npe = cm.nodes_per_element();
  BasisCache<dim> cache(cm.ref, quadrature_for<dim>(quad_degree));

  double e2 = 0, s2 = 0;
  for (int e = 0; e < cm.n_elements(); ++e) {
    for (int q = 0; q < cache.rule.size(); ++q) {
      const Mat<dim> J = frame.jacobian(e, cache.rule.points[q]);
      const double det = J.determinant();
      const auto grad_phys = (cache.grads[q] * J.inverse()).eval();
      Vec<dim> x = Vec<dim>::Zero();
      double uh = 0;
      Vec<dim> guh = Vec<dim>::Zero();
      for (int l = 0; l < npe; ++l) {
        const double c = U[sp.dof(e, l)];
        x += cache.vals[q][l] * frame.node(e, l);
        uh += c * cache.vals[q][l];
        guh += c * grad_phys.row(l).transpose();
      }
      Vec<dim> x_eval = x;
      if (lifted_eval) x_eval = lift_point_ref(frame, *geom, e, cache.rule.points[q], x);
      const double w = cache.rule.weights[q] * det;
      const double du = u(t, x_eval) - uh;
      const Vec<dim> dg = grad_u(t, x_eval) - guh;
      e2 += w * du * du;
      s2 += w * dg.squaredNorm();
    }
  }
  ErrorNorms norms;
  norms.l2 = std::sqrt(e2);
  norms.h1_semi = std::sqrt(s2);
  norms.h1_norm = std::sqrt(e2 + s2);
  return norms;
}

// eoc_r = log(e_{r-1}/e_r) / log(h_{r-1}/h_r); the first level has none.
inline std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs) {
  if (errors.size() != hs.size() || errors.size() < 2)
    throw Error("eoc: need matching lists of length >= 2");
  for (double e : errors)
    if (!(e > 0)) throw Error("eoc: errors must be positive");
  for (double h : hs)
    if (!(h > 0)) throw Error("eoc: mesh sizes must be positive");
  std::vector<double> out;
  for (size_t r = 1; r < errors.size(); ++r)
    out.push_back(std::log(errors[r - 1] / errors[r]) / std::log(hs[r - 1] / hs[r]));
  return out;
}

}  // namespace movefem
