// Time-dependent level-set description of the interface: evaluation,
// normals, signed distance and closest-point projection. The sign convention
// is phi < 0 inside the enclosed region (region 1).
#pragma once

#include "movefem/common.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace movefem {

template <int dim>
struct LevelSetGeometry {
  std::function<double(double, const Vec<dim>&)> phi;
  std::function<Vec<dim>(double, const Vec<dim>&)> grad_phi;
  // Needed for lift Jacobians (derivative of the projection).
  std::function<Mat<dim>(double, const Vec<dim>&)> hess_phi;
  Box<dim> domain_box;
  double tube_delta = 0.35;  // width of the tubular neighbourhood used by callers
  std::string name;
};

template <int dim>
struct ClosestPointResult {
  Vec<dim> point = Vec<dim>::Zero();
  double distance = 0.0;   // signed: negative inside region 1
  double multiplier = 0.0; // Lagrange multiplier; feeds the projection derivative
  int iterations = 0;
  bool converged = false;
};

// Closest point on {phi(t,.) = 0} by Newton on the stationarity system of
//   min |y-x|^2  s.t. phi(t,y)=0,
// started from the first-order projection x - phi * grad/|grad|^2.
template <int dim>
ClosestPointResult<dim> closest_point(const LevelSetGeometry<dim>& geom, double t,
                                      const Vec<dim>& x, int max_iter = 50,
                                      double tol = 1e-13) {
  ClosestPointResult<dim> res;
  Vec<dim> g = geom.grad_phi(t, x);
  double g2 = g.squaredNorm();
  if (g2 < 1e-24) return res;  // gradient vanished: cannot project
  double p = geom.phi(t, x);
  Vec<dim> y = x - (p / g2) * g;
  double lambda = p / g2;

  Eigen::Matrix<double, dim + 1, dim + 1> J;
  Eigen::Matrix<double, dim + 1, 1> r;
  for (int it = 1; it <= max_iter; ++it) {
    g = geom.grad_phi(t, y);
    const Mat<dim> H = geom.hess_phi(t, y);
    p = geom.phi(t, y);
    r.template head<dim>() = y - x + lambda * g;
    r[dim] = p;
    if (r.norm() <= tol) {
      res.point = y;
      res.multiplier = lambda;
      res.iterations = it;
      res.converged = true;
      break;
    }
    J.setZero();
    J.template topLeftCorner<dim, dim>() = Mat<dim>::Identity() + lambda * H;
    J.template topRightCorner<dim, 1>() = g;
    J.template bottomLeftCorner<1, dim>() = g.transpose();
    Eigen::Matrix<double, dim + 1, 1> step = J.fullPivLu().solve(-r);
    y += step.template head<dim>();
    lambda += step[dim];
  }
  if (!res.converged) return res;

  const double sign = geom.phi(t, x) < 0 ? -1.0 : 1.0;
  res.distance = sign * (x - res.point).norm();
  return res;
}

template <int dim>
double signed_distance(const LevelSetGeometry<dim>& geom, double t, const Vec<dim>& x) {
  auto cp = closest_point(geom, t, x);
  if (!cp.converged) throw Error("signed_distance: closest-point iteration failed");
  return cp.distance;
}

// Unit normal grad(phi)/|grad(phi)|, oriented from region 1 (phi<0) to
// region 2. x must lie on the interface.
template <int dim>
Vec<dim> surface_normal(const LevelSetGeometry<dim>& geom, double t, const Vec<dim>& x) {
  if (std::abs(geom.phi(t, x)) > 1e-8)
    throw Error("surface_normal: point is not on the interface");
  Vec<dim> g = geom.grad_phi(t, x);
  const double n = g.norm();
  if (n < 1e-12) throw Error("surface_normal: vanishing level-set gradient");
  return g / n;
}

// Derivative of the closest-point map at a converged projection, from
// implicit differentiation of its stationarity system.
template <int dim>
Mat<dim> projection_derivative(const LevelSetGeometry<dim>& geom, double t,
                               const ClosestPointResult<dim>& cp) {
  if (!cp.converged) throw Error("projection_derivative: projection did not converge");
  const Vec<dim> g = geom.grad_phi(t, cp.point);
  const Mat<dim> H = geom.hess_phi(t, cp.point);
  Eigen::Matrix<double, dim + 1, dim + 1> J;
  J.setZero();
  J.template topLeftCorner<dim, dim>() = Mat<dim>::Identity() + cp.multiplier * H;
  J.template topRightCorner<dim, 1>() = g;
  J.template bottomLeftCorner<1, dim>() = g.transpose();
  Eigen::Matrix<double, dim + 1, dim> rhs;
  rhs.setZero();
  rhs.template topLeftCorner<dim, dim>() = Mat<dim>::Identity();
  Eigen::Matrix<double, dim + 1, dim> sol = J.fullPivLu().solve(rhs);
  return sol.template topLeftCorner<dim, dim>();
}

// --- geometry factories -----------------------------------------------------

// Circle / sphere of radius r centred at the origin (time-independent).
template <int dim>
LevelSetGeometry<dim> make_circle_geometry(double r) {
  LevelSetGeometry<dim> geom;
  geom.name = "circle";
  geom.phi = [r](double, const Vec<dim>& x) { return x.squaredNorm() - r * r; };
  geom.grad_phi = [](double, const Vec<dim>& x) { return Vec<dim>(2.0 * x); };
  geom.hess_phi = [](double, const Vec<dim>&) { return Mat<dim>(2.0 * Mat<dim>::Identity()); };
  geom.tube_delta = 0.5 * r;
  return geom;
}

// Static ellipse x1^2/a^2 + x2^2/b^2 (+ x3^2) - rhs = 0.
template <int dim>
LevelSetGeometry<dim> make_static_ellipse_geometry(double a, double b, double rhs = 0.5) {
  LevelSetGeometry<dim> geom;
  geom.name = "static-ellipse";
  geom.phi = [a, b, rhs](double, const Vec<dim>& x) {
    double v = x[0] * x[0] / (a * a) + x[1] * x[1] / (b * b) - rhs;
    if constexpr (dim == 3) v += x[2] * x[2];
    return v;
  };
  geom.grad_phi = [a, b](double, const Vec<dim>& x) {
    Vec<dim> g;
    g[0] = 2.0 * x[0] / (a * a);
    g[1] = 2.0 * x[1] / (b * b);
    if constexpr (dim == 3) g[2] = 2.0 * x[2];
    return g;
  };
  geom.hess_phi = [a, b](double, const Vec<dim>&) {
    Mat<dim> h = Mat<dim>::Zero();
    h(0, 0) = 2.0 / (a * a);
    h(1, 1) = 2.0 / (b * b);
    if constexpr (dim == 3) h(2, 2) = 2.0;
    return h;
  };
  return geom;
}

// Moving ellipse x1^2/alpha(t)^2 + x2^2/beta(t)^2 (+ x3^2) - 1/2 = 0 with
// alpha(t) = 1 + 0.25 sin t, beta(t) = 1 + 0.25 cos t.
inline double ellipse_alpha(double t) { return 1.0 + 0.25 * std::sin(t); }
inline double ellipse_beta(double t) { return 1.0 + 0.25 * std::cos(t); }

template <int dim>
LevelSetGeometry<dim> make_moving_ellipse_geometry() {
  LevelSetGeometry<dim> geom;
  geom.name = "ellipse";
  geom.phi = [](double t, const Vec<dim>& x) {
    const double a = ellipse_alpha(t), b = ellipse_beta(t);
    double v = x[0] * x[0] / (a * a) + x[1] * x[1] / (b * b) - 0.5;
    if constexpr (dim == 3) v += x[2] * x[2];
    return v;
  };
  geom.grad_phi = [](double t, const Vec<dim>& x) {
    const double a = ellipse_alpha(t), b = ellipse_beta(t);
    Vec<dim> g;
    g[0] = 2.0 * x[0] / (a * a);
    g[1] = 2.0 * x[1] / (b * b);
    if constexpr (dim == 3) g[2] = 2.0 * x[2];
    return g;
  };
  geom.hess_phi = [](double t, const Vec<dim>&) {
    const double a = ellipse_alpha(t), b = ellipse_beta(t);
    Mat<dim> h = Mat<dim>::Zero();
    h(0, 0) = 2.0 / (a * a);
    h(1, 1) = 2.0 / (b * b);
    if constexpr (dim == 3) h(2, 2) = 2.0;
    return h;
  };
  return geom;
}

template <int dim>
LevelSetGeometry<dim> make_geometry(const std::string& name) {
  if (name == "ellipse") return make_moving_ellipse_geometry<dim>();
  if (name == "circle") return make_circle_geometry<dim>(0.5);
  throw Error("make_geometry: unknown geometry '" + name + "'");
}

}  // namespace movefem
