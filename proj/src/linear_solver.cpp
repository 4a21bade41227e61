#include "movefem/linear_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace movefem {

namespace {

double rel_residual(const CsrMatrix& A, const Vector& x, const Vector& b) {
  const double bn = b.norm();
  return (A.apply(x) - b).norm() / (bn > 0 ? bn : 1.0);
}

Vector solve_lu(const CsrMatrix& A, const Vector& b, const SolverConfig& cfg, SolveStats* stats) {
  Eigen::SparseMatrix<double> S(A.rows(), A.cols());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(A.nnz());
  for (int r = 0; r < A.rows(); ++r)
    for (int k = A.row_offsets()[r]; k < A.row_offsets()[r + 1]; ++k)
      trips.emplace_back(r, A.col_indices()[k], A.values()[k]);
  S.setFromTriplets(trips.begin(), trips.end());
  S.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(S);
  lu.factorize(S);
  if (lu.info() != Eigen::Success) throw SolverError("direct-LU: singular pivot in factorization");
  Vector x = lu.solve(b);
  const double res = rel_residual(A, x, b);
  if (stats) {
    stats->iterations = 1;
    stats->residual = res;
  }
  if (!(res <= std::max(cfg.rel_tol, 1e-10)))
    throw SolverError("direct-LU: residual " + std::to_string(res) + " above tolerance");
  return x;
}

Vector solve_cg(const CsrMatrix& A, const Vector& b, const SolverConfig& cfg, SolveStats* stats) {
  if (A.asymmetry() > 1e-12)
    throw SolverError("CG: matrix is not symmetric");
  const int n = A.rows();
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 10 * n;
  Vector x = Vector::Zero(n);
  Vector r = b;
  Vector p = r;
  double rr = r.squaredNorm();
  const double target = cfg.rel_tol * b.norm();
  int it = 0;
  while (std::sqrt(rr) > target && it < max_iter) {
    Vector Ap = A.apply(p);
    const double alpha = rr / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
    ++it;
  }
  const double res = rel_residual(A, x, b);
  if (stats) {
    stats->iterations = it;
    stats->residual = res;
  }
  if (!(res <= cfg.rel_tol))
    throw SolverError("CG: no convergence after " + std::to_string(it) + " iterations, residual " +
                      std::to_string(res));
  return x;
}

Vector solve_bicgstab(const CsrMatrix& A, const Vector& b, const SolverConfig& cfg,
                      SolveStats* stats) {
  const int n = A.rows();
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 10 * n;
  // Jacobi-preconditioned BiCGStab
  Vector d(n);
  for (int r = 0; r < n; ++r) {
    const double v = A.coeff(r, r);
    d[r] = (std::abs(v) > 1e-300) ? 1.0 / v : 1.0;
  }
  auto precond = [&](const Vector& v) { return Vector(d.cwiseProduct(v)); };

  Vector x = Vector::Zero(n);
  Vector r = b;
  Vector r0 = r;
  double rho = 1, alpha = 1, omega = 1;
  Vector v = Vector::Zero(n), p = Vector::Zero(n);
  const double target = cfg.rel_tol * b.norm();
  int it = 0;
  while (r.norm() > target && it < max_iter) {
    const double rho_new = r0.dot(r);
    if (std::abs(rho_new) < 1e-300) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    p = r + beta * (p - omega * v);
    Vector ph = precond(p);
    v = A.apply(ph);
    alpha = rho_new / r0.dot(v);
    Vector s = r - alpha * v;
    Vector sh = precond(s);
    Vector t = A.apply(sh);
    const double tt = t.squaredNorm();
    omega = tt > 0 ? t.dot(s) / tt : 0.0;
    x += alpha * ph + omega * sh;
    r = s - omega * t;
    rho = rho_new;
    ++it;
  }
  const double res = rel_residual(A, x, b);
  if (stats) {
    stats->iterations = it;
    stats->residual = res;
  }
  if (!(res <= cfg.rel_tol))
    throw SolverError("BiCGStab: no convergence after " + std::to_string(it) +
                      " iterations, residual " + std::to_string(res));
  return x;
}

}  // namespace

SolverMethod SolverConfig::parse_method(const std::string& name) {
  if (name == "direct-lu") return SolverMethod::DirectLU;
  if (name == "cg") return SolverMethod::CG;
  if (name == "bicgstab") return SolverMethod::BiCGStab;
  throw Error("unknown solver method '" + name + "'");
}

Vector solve(const CsrMatrix& A, const Vector& b, const SolverConfig& cfg, SolveStats* stats) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw Error("solve: dimension mismatch");
  if (cfg.rel_tol <= 0 || cfg.rel_tol > 1e-2)
    throw Error("solve: rel_tol outside (0, 1e-2]");
  switch (cfg.method) {
    case SolverMethod::DirectLU:
      return solve_lu(A, b, cfg, stats);
    case SolverMethod::CG:
      return solve_cg(A, b, cfg, stats);
    case SolverMethod::BiCGStab:
      return solve_bicgstab(A, b, cfg, stats);
  }
  throw Error("solve: unknown method");
}

}  // namespace movefem
