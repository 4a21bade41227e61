#include "movefem/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace movefem {

namespace {

constexpr int kMaxDegree = 20;

// Golub-Welsch on the Jacobi weight (1-x)^alpha (1+x)^beta over [-1,1],
// restricted to the integer alpha, beta = 0 cases needed here.
void gauss_jacobi_m11(int n, double alpha, double beta, std::vector<double>& x,
                      std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    double denom = (2 * k + ab) * (2 * k + ab + 2);
    J(k, k) = denom == 0 ? 0.0 : (beta * beta - alpha * alpha) / denom;
    if (k > 0) {
      double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
      double den = (2 * k + ab) * (2 * k + ab) * (2 * k + ab + 1) * (2 * k + ab - 1);
      double b = std::sqrt(num / den);
      J(k, k - 1) = b;
      J(k - 1, k) = b;
    }
  }
  // mu0 = int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
  double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
               std::tgamma(ab + 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()[i];
    double v = es.eigenvectors()(0, i);
    w[i] = mu0 * v * v;
  }
}

QuadratureRule<1> jacobi_rule_01(int n, int alpha) {
  std::vector<double> x, w;
  gauss_jacobi_m11(n, alpha, 0.0, x, w);
  QuadratureRule<1> rule;
  rule.exactness_degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  const double scale = std::pow(2.0, -(alpha + 1.0));
  for (int i = 0; i < n; ++i) {
    rule.points[i][0] = 0.5 * (1.0 + x[i]);
    rule.weights[i] = w[i] * scale;
  }
  return rule;
}

int points_per_direction(int degree) { return degree / 2 + 1; }

QuadratureRule<2> conical_triangle(int degree) {
  const int n = points_per_direction(degree);
  auto gu = gauss_legendre_01(n);
  auto gv = gauss_jacobi_01(n, 1);
  QuadratureRule<2> rule;
  rule.exactness_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double u = gu.points[i][0], v = gv.points[j][0];
      rule.points.push_back({u * (1.0 - v), v});
      rule.weights.push_back(gu.weights[i] * gv.weights[j]);
    }
  return rule;
}

QuadratureRule<3> conical_tet(int degree) {
  const int n = points_per_direction(degree);
  auto gu = gauss_legendre_01(n);
  auto gv = gauss_jacobi_01(n, 1);
  auto gw = gauss_jacobi_01(n, 2);
  QuadratureRule<3> rule;
  rule.exactness_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double u = gu.points[i][0], v = gv.points[j][0], w = gw.points[k][0];
        rule.points.push_back({u * (1.0 - v) * (1.0 - w), v * (1.0 - w), w});
        rule.weights.push_back(gu.weights[i] * gv.weights[j] * gw.weights[k]);
      }
  return rule;
}

void push_orbit3(QuadratureRule<2>& rule, double a, double w) {
  // three-fold orbit with barycentric (1-2a, a, a)
  rule.points.push_back({a, a});
  rule.points.push_back({1.0 - 2.0 * a, a});
  rule.points.push_back({a, 1.0 - 2.0 * a});
  for (int i = 0; i < 3; ++i) rule.weights.push_back(w);
}

QuadratureRule<2> triangle_centroid() {
  QuadratureRule<2> rule;
  rule.exactness_degree = 1;
  rule.points.push_back({1.0 / 3.0, 1.0 / 3.0});
  rule.weights.push_back(0.5);
  return rule;
}

QuadratureRule<2> triangle_deg2() {
  QuadratureRule<2> rule;
  rule.exactness_degree = 2;
  push_orbit3(rule, 1.0 / 6.0, 1.0 / 6.0);
  return rule;
}

QuadratureRule<2> triangle_deg5() {
  // Radon's 7-point rule; orbit data in closed form.
  QuadratureRule<2> rule;
  rule.exactness_degree = 5;
  const double s15 = std::sqrt(15.0);
  rule.points.push_back({1.0 / 3.0, 1.0 / 3.0});
  rule.weights.push_back(0.5 * 9.0 / 40.0);
  push_orbit3(rule, (6.0 - s15) / 21.0, 0.5 * (155.0 - s15) / 1200.0);
  push_orbit3(rule, (6.0 + s15) / 21.0, 0.5 * (155.0 + s15) / 1200.0);
  return rule;
}

QuadratureRule<3> tet_deg1() {
  QuadratureRule<3> rule;
  rule.exactness_degree = 1;
  rule.points.push_back({0.25, 0.25, 0.25});
  rule.weights.push_back(1.0 / 6.0);
  return rule;
}

QuadratureRule<3> tet_deg2() {
  QuadratureRule<3> rule;
  rule.exactness_degree = 2;
  const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
  const double b = (5.0 - std::sqrt(5.0)) / 20.0;
  const double w = 1.0 / 24.0;
  rule.points.push_back({a, b, b});
  rule.points.push_back({b, a, b});
  rule.points.push_back({b, b, a});
  rule.points.push_back({b, b, b});
  for (int i = 0; i < 4; ++i) rule.weights.push_back(w);
  return rule;
}

}  // namespace

QuadratureRule<1> gauss_legendre_01(int n) { return jacobi_rule_01(n, 0); }
QuadratureRule<1> gauss_jacobi_01(int n, int alpha) { return jacobi_rule_01(n, alpha); }

template <>
QuadratureRule<1> quadrature_for<1>(int degree) {
  if (degree < 1 || degree > kMaxDegree)
    throw Error("quadrature_for: unsupported degree " + std::to_string(degree));
  return gauss_legendre_01(points_per_direction(degree));
}

template <>
QuadratureRule<2> quadrature_for<2>(int degree) {
  if (degree < 1 || degree > kMaxDegree)
    throw Error("quadrature_for: unsupported degree " + std::to_string(degree));
  switch (degree) {
    case 1:
      return triangle_centroid();
    case 2:
      return triangle_deg2();
    case 3:
    case 4:
    case 5:
      return triangle_deg5();
    default:
      return conical_triangle(degree);
  }
}

template <>
QuadratureRule<3> quadrature_for<3>(int degree) {
  if (degree < 1 || degree > kMaxDegree)
    throw Error("quadrature_for: unsupported degree " + std::to_string(degree));
  switch (degree) {
    case 1:
      return tet_deg1();
    case 2:
      return tet_deg2();
    default:
      return conical_tet(degree);
  }
}

}  // namespace movefem
