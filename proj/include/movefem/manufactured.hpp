// Manufactured problems: an exact solution with analytic derivatives, and the
// data (bulk load and interface flux jump) derived from it, so discretization
// error is directly measurable.
#pragma once

#include "movefem/assembly.hpp"
#include "movefem/flow.hpp"
#include "movefem/level_set.hpp"

#include <cmath>

namespace movefem {

template <int dim>
struct ManufacturedProblem {
  LevelSetGeometry<dim> geom;
  FlowMap<dim> flow;
  double A1 = 10.0;  // diffusion inside the interface
  double A2 = 1.0;   // diffusion outside

  std::function<double(double, const Vec<dim>&)> u;
  std::function<Vec<dim>(double, const Vec<dim>&)> grad_u;
  std::function<double(double, const Vec<dim>&)> dt_u;
  std::function<double(double, const Vec<dim>&)> lap_u;

  double A(int region) const { return region == 1 ? A1 : A2; }

  // f_i = du/dt - A_i laplace(u); the problems here have no advection or
  // reaction coefficient.
  double derive_data(double t, const Vec<dim>& x, int region) const {
    return dt_u(t, x) - A(region) * lap_u(t, x);
  }

  // G = (A1 - A2) * grad(u) . normal, from the flux-jump condition of a
  // globally smooth exact solution.
  double derive_interface(double t, const Vec<dim>& x) const {
    return (A1 - A2) * grad_u(t, x).dot(surface_normal(geom, t, x));
  }

  // Self-contained coefficient field (safe to outlive the problem object).
  CoefficientField<dim> coefficients() const {
    CoefficientField<dim> c;
    const double a1 = A1, a2 = A2;
    c.A = [a1, a2](double, const Vec<dim>&, int region) { return region == 1 ? a1 : a2; };
    c.f = [a1, a2, dtu = dt_u, lap = lap_u](double t, const Vec<dim>& x, int region) {
      return dtu(t, x) - (region == 1 ? a1 : a2) * lap(t, x);
    };
    c.G = [a1, a2, gu = grad_u, g = geom](double t, const Vec<dim>& x) {
      return (a1 - a2) * gu(t, x).dot(surface_normal(g, t, x));
    };
    return c;
  }
};

// Exact solution of the moving-ellipse study:
//   u(t, x) = sin(t) * r(t, x) * prod_i sin(2 pi x_i),
// where r is the norm of the affine interface transport
//   (alpha(t)/alpha(0) x_1, beta(t)/beta(0) x_2 [, x_3]).
// With time_dependent_factor = false the factor freezes to |x|. The factor is
// Lipschitz at the origin; the product of sines vanishes there fast enough
// that u and the derived data stay bounded (both are zero in the limit).
template <int dim>
ManufacturedProblem<dim> make_moving_ellipse_problem(const std::string& flow_mode = "fallback",
                                                     bool time_dependent_factor = true) {
  ManufacturedProblem<dim> prob;
  prob.geom = make_moving_ellipse_geometry<dim>();
  prob.flow = make_flow<dim>(flow_mode);
  const double a0 = ellipse_alpha(0.0), b0 = ellipse_beta(0.0);

  struct Factor {
    double a, b, da, db;  // axis scalings and their time derivatives
  };
  auto factor = [a0, b0, time_dependent_factor](double t) {
    Factor f;
    if (time_dependent_factor) {
      f.a = ellipse_alpha(t) / a0;
      f.b = ellipse_beta(t) / b0;
      f.da = 0.25 * std::cos(t) / a0;
      f.db = -0.25 * std::sin(t) / b0;
    } else {
      f.a = f.b = 1.0;
      f.da = f.db = 0.0;
    }
    return f;
  };
  auto scaled = [factor](double t, const Vec<dim>& x) {
    const Factor f = factor(t);
    Vec<dim> m;
    m[0] = f.a * f.a * x[0];
    m[1] = f.b * f.b * x[1];
    if constexpr (dim == 3) m[2] = x[2];
    return m;
  };
  auto radius = [factor](double t, const Vec<dim>& x) {
    const Factor f = factor(t);
    double r2 = f.a * f.a * x[0] * x[0] + f.b * f.b * x[1] * x[1];
    if constexpr (dim == 3) r2 += x[2] * x[2];
    return std::sqrt(r2);
  };
  constexpr double tiny = 1e-14;
  auto sines = [](const Vec<dim>& x) {
    double g = 1.0;
    for (int i = 0; i < dim; ++i) g *= std::sin(2.0 * M_PI * x[i]);
    return g;
  };
  auto grad_sines = [](const Vec<dim>& x) {
    Vec<dim> gg;
    for (int i = 0; i < dim; ++i) {
      double v = 2.0 * M_PI * std::cos(2.0 * M_PI * x[i]);
      for (int j = 0; j < dim; ++j)
        if (j != i) v *= std::sin(2.0 * M_PI * x[j]);
      gg[i] = v;
    }
    return gg;
  };

  prob.u = [radius, sines](double t, const Vec<dim>& x) {
    return std::sin(t) * radius(t, x) * sines(x);
  };
  prob.grad_u = [radius, scaled, sines, grad_sines](double t, const Vec<dim>& x) {
    const double r = radius(t, x);
    if (r < tiny) return Vec<dim>(Vec<dim>::Zero());
    const Vec<dim> dr = scaled(t, x) / r;
    return Vec<dim>(std::sin(t) * (sines(x) * dr + r * grad_sines(x)));
  };
  prob.dt_u = [factor, radius, sines](double t, const Vec<dim>& x) {
    const double r = radius(t, x);
    const double g = sines(x);
    if (r < tiny) return 0.0;
    const Factor f = factor(t);
    const double dr_dt = (f.a * f.da * x[0] * x[0] + f.b * f.db * x[1] * x[1]) / r;
    return std::cos(t) * r * g + std::sin(t) * dr_dt * g;
  };
  prob.lap_u = [factor, radius, scaled, sines, grad_sines](double t, const Vec<dim>& x) {
    const double r = radius(t, x);
    if (r < tiny) return 0.0;
    const Factor f = factor(t);
    const Vec<dim> m = scaled(t, x);
    double trace = f.a * f.a + f.b * f.b;
    if constexpr (dim == 3) trace += 1.0;
    const double lap_r = trace / r - m.squaredNorm() / (r * r * r);
    const Vec<dim> dr = m / r;
    const double g = sines(x);
    const double lap_g = -4.0 * M_PI * M_PI * dim * g;
    return std::sin(t) * (g * lap_r + 2.0 * dr.dot(grad_sines(x)) + r * lap_g);
  };
  return prob;
}

}  // namespace movefem
