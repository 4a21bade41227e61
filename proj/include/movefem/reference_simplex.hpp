// Order-k Lagrange reference elements on the unit simplex, with the
// equispaced barycentric lattice. Node order is deterministic: the d+1
// vertices come first (in vertex order), then the remaining lattice points in
// lexicographic order of their cartesian multi-index. Every element of a mesh
// shares this layout, which is what makes cross-element node matching work.
#pragma once

#include "movefem/common.hpp"

#include <Eigen/Dense>
#include <algorithm>

namespace movefem {

inline long binomial(int n, int r) {
  long v = 1;
  for (int i = 0; i < r; ++i) v = v * (n - i) / (i + 1);
  return v;
}

template <int dim>
class ReferenceSimplex {
 public:
  static_assert(dim == 1 || dim == 2 || dim == 3);

  explicit ReferenceSimplex(int order) : order_(order) {
    if (order < 1 || order > 3) throw Error("ReferenceSimplex: order must be in [1,3]");
    build_nodes();
    build_monomials();
    build_coefficients();
  }

  int order() const { return order_; }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Vec<dim>>& nodes() const { return nodes_; }

  // Barycentric coordinates (lambda_0, ..., lambda_dim) of a reference point.
  static Eigen::Matrix<double, dim + 1, 1> reference_barycentric(const Vec<dim>& x) {
    Eigen::Matrix<double, dim + 1, 1> lam;
    double s = 0;
    for (int i = 0; i < dim; ++i) {
      lam[i + 1] = x[i];
      s += x[i];
    }
    lam[0] = 1.0 - s;
    return lam;
  }

  static bool inside(const Vec<dim>& x, double tol = 1e-10) {
    auto lam = reference_barycentric(x);
    for (int i = 0; i <= dim; ++i)
      if (lam[i] < -tol) return false;
    return true;
  }

  Eigen::VectorXd eval(const Vec<dim>& x) const {
    require_inside(x);
    return coeffs_ * monomial_values(x);
  }

  Eigen::Matrix<double, Eigen::Dynamic, dim> grad(const Vec<dim>& x) const {
    require_inside(x);
    Eigen::Matrix<double, Eigen::Dynamic, dim> g(n_nodes(), dim);
    for (int c = 0; c < dim; ++c) g.col(c) = coeffs_ * monomial_derivs(x, c);
    return g;
  }

  // Unchecked variants for hot loops where the caller guarantees containment.
  Eigen::VectorXd eval_unchecked(const Vec<dim>& x) const { return coeffs_ * monomial_values(x); }
  Eigen::Matrix<double, Eigen::Dynamic, dim> grad_unchecked(const Vec<dim>& x) const {
    Eigen::Matrix<double, Eigen::Dynamic, dim> g(n_nodes(), dim);
    for (int c = 0; c < dim; ++c) g.col(c) = coeffs_ * monomial_derivs(x, c);
    return g;
  }

 private:
  void require_inside(const Vec<dim>& x) const {
    if (!inside(x)) throw Error("ReferenceSimplex: point outside the reference simplex");
  }

  void build_nodes() {
    const int k = order_;
    // vertices: origin then unit directions
    nodes_.assign(1, Vec<dim>::Zero());
    for (int i = 0; i < dim; ++i) {
      Vec<dim> v = Vec<dim>::Zero();
      v[i] = 1.0;
      nodes_.push_back(v);
    }
    // remaining lattice points i/k, lexicographic
    std::array<int, dim> idx{};
    enumerate_lattice(idx, 0, k);
  }

  void enumerate_lattice(std::array<int, dim>& idx, int pos, int k) {
    if (pos == dim) {
      int s = 0;
      for (int v : idx) s += v;
      if (s > k) return;
      bool is_vertex = (s == 0) || (s == k && *std::max_element(idx.begin(), idx.end()) == k);
      if (is_vertex) return;
      Vec<dim> x;
      for (int i = 0; i < dim; ++i) x[i] = static_cast<double>(idx[i]) / k;
      nodes_.push_back(x);
      return;
    }
    for (int v = 0; v <= k; ++v) {
      idx[pos] = v;
      enumerate_lattice(idx, pos + 1, k);
    }
  }

  void build_monomials() {
    std::array<int, dim> e{};
    enumerate_monomials(e, 0);
  }

  void enumerate_monomials(std::array<int, dim>& e, int pos) {
    if (pos == dim) {
      int s = 0;
      for (int v : e) s += v;
      if (s <= order_) exponents_.push_back(e);
      return;
    }
    for (int v = 0; v <= order_; ++v) {
      e[pos] = v;
      enumerate_monomials(e, pos + 1);
    }
  }

  void build_coefficients() {
    const int n = n_nodes();
    if (static_cast<int>(exponents_.size()) != n)
      throw Error("ReferenceSimplex: node/monomial count mismatch");
    Eigen::MatrixXd V(n, n);
    for (int i = 0; i < n; ++i) V.row(i) = monomial_values(nodes_[i]).transpose();
    coeffs_ = V.fullPivLu().inverse();  // row j holds the coefficients of basis j
  }

  Eigen::VectorXd monomial_values(const Vec<dim>& x) const {
    Eigen::VectorXd m(exponents_.size());
    for (size_t j = 0; j < exponents_.size(); ++j) {
      double v = 1.0;
      for (int i = 0; i < dim; ++i)
        for (int p = 0; p < exponents_[j][i]; ++p) v *= x[i];
      m[j] = v;
    }
    return m;
  }

  Eigen::VectorXd monomial_derivs(const Vec<dim>& x, int c) const {
    Eigen::VectorXd m(exponents_.size());
    for (size_t j = 0; j < exponents_.size(); ++j) {
      const int p = exponents_[j][c];
      if (p == 0) {
        m[j] = 0.0;
        continue;
      }
      double v = p;
      for (int i = 0; i < dim; ++i) {
        int e = exponents_[j][i] - (i == c ? 1 : 0);
        for (int q = 0; q < e; ++q) v *= x[i];
      }
      m[j] = v;
    }
    return m;
  }

  int order_;
  std::vector<Vec<dim>> nodes_;
  std::vector<std::array<int, dim>> exponents_;
  Eigen::MatrixXd coeffs_;
};

// Barycentric coordinates of x with respect to d+1 affinely independent
// vertices. Throws on a degenerate simplex.
template <int dim>
Eigen::Matrix<double, dim + 1, 1> barycentric_coords(const std::array<Vec<dim>, dim + 1>& verts,
                                                     const Vec<dim>& x) {
  Mat<dim> A;
  for (int j = 0; j < dim; ++j) A.col(j) = verts[j + 1] - verts[0];
  double scale = 0;
  for (int j = 0; j < dim; ++j) scale = std::max(scale, A.col(j).norm());
  const double det = A.determinant();
  if (std::abs(det) <= 1e-14 * std::pow(scale, dim))
    throw Error("barycentric_coords: degenerate simplex");
  Vec<dim> rest = A.inverse() * (x - verts[0]);
  Eigen::Matrix<double, dim + 1, 1> mu;
  mu[0] = 1.0 - rest.sum();
  for (int j = 0; j < dim; ++j) mu[j + 1] = rest[j];
  return mu;
}

}  // namespace movefem
