// Sparse linear solvers for the per-step systems. The direct path is a sparse
// LU with partial pivoting; CG and BiCGStab are provided for symmetric and
// general systems. Every accepted solution satisfies the residual contract
// ||Ax - b|| <= rel_tol ||b||.
#pragma once

#include "movefem/sparse.hpp"

#include <string>

namespace movefem {

enum class SolverMethod { DirectLU, CG, BiCGStab };

struct SolverConfig {
  SolverMethod method = SolverMethod::DirectLU;
  double rel_tol = 1e-12;
  int max_iter = 0;  // 0: use 10 * n

  static SolverMethod parse_method(const std::string& name);
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
};

Vector solve(const CsrMatrix& A, const Vector& b, const SolverConfig& cfg,
             SolveStats* stats = nullptr);

}  // namespace movefem
