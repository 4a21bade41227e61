// Shared aliases and error types used across the library.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace movefem {

template <int dim>
using Vec = Eigen::Matrix<double, dim, 1>;

template <int dim>
using Mat = Eigen::Matrix<double, dim, dim>;

using Vector = Eigen::VectorXd;

// Axis-aligned box [lo, hi]^dim; the studies all run on [-1,1]^dim.
template <int dim>
struct Box {
  double lo = -1.0;
  double hi = 1.0;

  bool contains(const Vec<dim>& x, double tol = 1e-12) const {
    for (int i = 0; i < dim; ++i)
      if (x[i] < lo - tol || x[i] > hi + tol) return false;
    return true;
  }
  bool on_boundary(const Vec<dim>& x, double tol = 1e-12) const {
    if (!contains(x, tol)) return false;
    for (int i = 0; i < dim; ++i)
      if (std::abs(x[i] - lo) <= tol || std::abs(x[i] - hi) <= tol) return true;
    return false;
  }
  double measure() const {
    double m = 1.0;
    for (int i = 0; i < dim; ++i) m *= (hi - lo);
    return m;
  }
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mesh or data fails a structural assumption; CLI maps this to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

// Linear solver did not reach its tolerance; CLI maps this to exit code 3.
struct SolverError : Error {
  using Error::Error;
};

}  // namespace movefem
