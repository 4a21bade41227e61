// Domain motion: analytic flow maps seeded at t = 0, discrete mesh motion by
// nodal transport, trajectories of node coordinates, and the interpolated /
// backward-difference mesh velocities.
#pragma once

#include "movefem/bdf.hpp"
#include "movefem/isoparametric.hpp"

#include <cmath>
#include <functional>

namespace movefem {

// map(t, x0): position at time t of the trajectory seeded at x0 (identity at
// t = 0). velocity(t, x0): time derivative along that same trajectory.
template <int dim>
struct FlowMap {
  std::function<Vec<dim>(double, const Vec<dim>&)> map;
  std::function<Vec<dim>(double, const Vec<dim>&)> velocity;
  std::string name;
};

template <int dim>
FlowMap<dim> make_stationary_flow() {
  FlowMap<dim> f;
  f.name = "stationary";
  f.map = [](double, const Vec<dim>& x) { return x; };
  f.velocity = [](double, const Vec<dim>&) { return Vec<dim>(Vec<dim>::Zero()); };
  return f;
}

template <int dim>
FlowMap<dim> make_translation_flow(const Vec<dim>& c) {
  FlowMap<dim> f;
  f.name = "translation";
  f.map = [c](double t, const Vec<dim>& x) { return Vec<dim>(x + t * c); };
  f.velocity = [c](double, const Vec<dim>&) { return c; };
  return f;
}

// Blending weight for the ellipse motion: exactly 1 on the initial interface,
// exactly 0 on the box walls, smooth on either side of the interface.
//   psi = prod (1 - x_i^2),  qval = phi(0, x),  s = kappa psi / (qval + kappa psi).
inline constexpr double kEllipseBlendKappa = 0.5;

template <int dim>
double ellipse_blend(const Vec<dim>& x) {
  const double a0 = ellipse_alpha(0.0), b0 = ellipse_beta(0.0);
  double q = x[0] * x[0] / (a0 * a0) + x[1] * x[1] / (b0 * b0) - 0.5;
  if constexpr (dim == 3) q += x[2] * x[2];
  if (q <= 0) return 1.0;
  double psi = 1.0;
  for (int i = 0; i < dim; ++i) psi *= (1.0 - x[i] * x[i]);
  return kEllipseBlendKappa * psi / (q + kEllipseBlendKappa * psi);
}

// Default motion for the moving-ellipse geometry. The axis scalings
// alpha(t)/alpha(0), beta(t)/beta(0) transport the initial interface exactly
// onto the interface at time t; the blend freezes the box walls.
template <int dim>
FlowMap<dim> make_ellipse_flow() {
  FlowMap<dim> f;
  f.name = "fallback";
  const double a0 = ellipse_alpha(0.0), b0 = ellipse_beta(0.0);
  f.map = [a0, b0](double t, const Vec<dim>& x) {
    const double s = ellipse_blend<dim>(x);
    Vec<dim> y = x;
    y[0] += s * (ellipse_alpha(t) / a0 - 1.0) * x[0];
    y[1] += s * (ellipse_beta(t) / b0 - 1.0) * x[1];
    return y;
  };
  f.velocity = [a0, b0](double t, const Vec<dim>& x) {
    const double s = ellipse_blend<dim>(x);
    Vec<dim> v = Vec<dim>::Zero();
    v[0] = s * (0.25 * std::cos(t) / a0) * x[0];
    v[1] = s * (-0.25 * std::sin(t) / b0) * x[1];
    return v;
  };
  return f;
}

// The flow map in its printed closed form. It has singular points inside the
// box (|x| = 0 and zeros of the denominator product) and is not the identity
// at t = 0; evaluation at a singular point throws. Kept for side-by-side
// inspection; studies default to the fallback motion.
template <int dim>
FlowMap<dim> make_strict_flow() {
  FlowMap<dim> f;
  f.name = "paper-strict";
  auto factor = [](const Vec<dim>& x) {
    const double r = x.norm();
    if (r < 1e-12) throw Error("strict flow: singular at |x| = 0");
    double num = std::pow(r, 1.0 / 3.0);
    double den = 0.5;
    for (int i = 0; i < dim; ++i) {
      num *= (1.0 - x[i] * x[i]);
      den *= (1.0 - 4.0 * x[i] * x[i] / r);
    }
    if (std::abs(den) < 1e-10) throw Error("strict flow: singular denominator");
    return num / den;
  };
  f.map = [factor](double t, const Vec<dim>& x) {
    const double g = factor(x);
    Vec<dim> y = x;
    y[0] += g * (ellipse_alpha(t) - 1.0) * x[0];
    y[1] += g * (ellipse_beta(t) - 1.0) * x[1];
    return y;
  };
  f.velocity = [factor](double t, const Vec<dim>& x) {
    const double g = factor(x);
    Vec<dim> v = Vec<dim>::Zero();
    v[0] = g * 0.25 * std::cos(t) * x[0];
    v[1] = g * (-0.25) * std::sin(t) * x[1];
    return v;
  };
  return f;
}

template <int dim>
FlowMap<dim> make_flow(const std::string& name) {
  if (name == "fallback") return make_ellipse_flow<dim>();
  if (name == "paper-strict") return make_strict_flow<dim>();
  if (name == "stationary") return make_stationary_flow<dim>();
  throw Error("make_flow: unknown flow '" + name + "'");
}

template <int dim>
Vec<dim> flow_eval(const FlowMap<dim>& flow, double t, const Vec<dim>& x) {
  return flow.map(t, x);
}

// Move every geometric node along its trajectory; aborts on element inversion.
template <int dim>
CurvedMesh<dim> move_mesh(const CurvedMesh<dim>& base, const FlowMap<dim>& flow, double t) {
  CurvedMesh<dim> moved = base;
  moved.time = t;
  for (int g = 0; g < base.n_nodes(); ++g) moved.nodes[g] = flow.map(t, base.nodes[g]);
  for (size_t v = 0; v < base.base.vertices.size(); ++v)
    moved.base.vertices[v] = moved.nodes[base.vertex_node[v]];
  MeshFrame<dim> frame(moved);
  auto rule = quadrature_for<dim>(2 * base.k_geo + 2);
  for (int e = 0; e < moved.n_elements(); ++e)
    for (const auto& q : rule.points)
      if (frame.jacobian(e, q).determinant() <= 0)
        throw ValidationError("move_mesh: element " + std::to_string(e) + " inverted at t = " +
                              std::to_string(t));
  return moved;
}

// Node coordinate history of a moving mesh on a uniform time grid; topology is
// shared with the base mesh throughout.
template <int dim>
struct MeshTrajectory {
  const CurvedMesh<dim>* base = nullptr;
  std::vector<double> times;
  std::vector<std::vector<Vec<dim>>> coords;

  MeshFrame<dim> frame(int j) const { return MeshFrame<dim>(*base, coords.at(j), times.at(j)); }
  int steps() const { return static_cast<int>(times.size()) - 1; }
};

template <int dim>
MeshTrajectory<dim> build_trajectory(const CurvedMesh<dim>& base, const FlowMap<dim>& flow,
                                     double tau, int n_steps) {
  MeshTrajectory<dim> traj;
  traj.base = &base;
  auto rule = quadrature_for<dim>(2 * base.k_geo + 2);
  for (int j = 0; j <= n_steps; ++j) {
    const double t = j * tau;
    traj.times.push_back(t);
    std::vector<Vec<dim>> X(base.n_nodes());
    for (int g = 0; g < base.n_nodes(); ++g) X[g] = flow.map(t, base.nodes[g]);
    traj.coords.push_back(std::move(X));
    MeshFrame<dim> frame(base, traj.coords.back(), t);
    for (int e = 0; e < base.n_elements(); ++e)
      for (const auto& q : rule.points)
        if (frame.jacobian(e, q).determinant() <= 0)
          throw ValidationError("trajectory: element " + std::to_string(e) +
                                " inverted at t = " + std::to_string(t));
  }
  return traj;
}

// Interpolated velocity: nodal values of the analytic trajectory derivative.
template <int dim>
std::vector<Vec<dim>> discrete_velocity(const CurvedMesh<dim>& base, const FlowMap<dim>& flow,
                                        double t) {
  std::vector<Vec<dim>> w(base.n_nodes());
  for (int g = 0; g < base.n_nodes(); ++g) w[g] = flow.velocity(t, base.nodes[g]);
  return w;
}

// Backward-difference mesh velocity from node position history.
template <int dim>
std::vector<Vec<dim>> bdf_mesh_velocity(const MeshTrajectory<dim>& traj, int j, int q,
                                        double tau) {
  if (j < q) throw Error("bdf_mesh_velocity: insufficient history");
  auto delta = bdf_weights(q);
  const int n = static_cast<int>(traj.coords[j].size());
  std::vector<Vec<dim>> w(n, Vec<dim>::Zero());
  for (int l = 0; l <= q; ++l) {
    const auto& X = traj.coords[j - l];
    for (int g = 0; g < n; ++g) w[g] += (delta[l] / tau) * X[g];
  }
  return w;
}

}  // namespace movefem
