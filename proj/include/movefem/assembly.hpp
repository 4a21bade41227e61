// Assembly of the discrete forms on a mesh frame: mass, the advection-
// diffusion-reaction operator with mesh-velocity corrections, the divergence-
// weighted mass form, and the load with its bulk and interface parts.
// Element loops run over deterministic contiguous chunks, so results are
// independent of the thread count.
#pragma once

#include "movefem/fe_space.hpp"
#include "movefem/quadrature.hpp"
#include "movefem/sparse.hpp"

#include <cstdlib>
#include <functional>
#include <thread>

namespace movefem {

enum class EvalMode { Discrete, Lifted };
enum class DataMode { Interpolated, Lifted };

// Problem data: diffusion A (per region), advection B, reaction C, bulk load f
// (per region), interface load G. Null members read as zero; A must be set
// wherever an operator is assembled. eval_mode selects whether bulk
// coefficients see discrete points or their lifted images.
template <int dim>
struct CoefficientField {
  std::function<double(double, const Vec<dim>&, int)> A;
  std::function<Vec<dim>(double, const Vec<dim>&)> B;
  std::function<double(double, const Vec<dim>&)> C;
  std::function<double(double, const Vec<dim>&, int)> f;
  std::function<double(double, const Vec<dim>&)> G;
  EvalMode eval_mode = EvalMode::Discrete;
};

// Nodal vector field on the mesh's geometric nodes (mesh velocities).
template <int dim>
using NodalField = std::vector<Vec<dim>>;

inline int thread_count() {
  if (const char* env = std::getenv("MOVEFEM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

// Run fn(chunk, begin, end) over n_chunks contiguous ranges; chunk results
// must be merged by the caller in chunk order.
inline void run_chunks(int n_items, int n_chunks,
                       const std::function<void(int, int, int)>& fn) {
  n_chunks = std::max(1, std::min(n_chunks, n_items));
  if (n_chunks == 1) {
    fn(0, 0, n_items);
    return;
  }
  std::vector<std::thread> pool;
  for (int c = 0; c < n_chunks; ++c) {
    const int begin = static_cast<int>(static_cast<long>(n_items) * c / n_chunks);
    const int end = static_cast<int>(static_cast<long>(n_items) * (c + 1) / n_chunks);
    pool.emplace_back(fn, c, begin, end);
  }
  for (auto& t : pool) t.join();
}

// Basis values and reference gradients cached at the points of a rule.
template <int dim>
struct BasisCache {
  QuadratureRule<dim> rule;
  std::vector<Eigen::VectorXd> vals;
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, dim>> grads;

  BasisCache(const ReferenceSimplex<dim>& ref, QuadratureRule<dim> r) : rule(std::move(r)) {
    for (const auto& p : rule.points) {
      vals.push_back(ref.eval_unchecked(p));
      grads.push_back(ref.grad_unchecked(p));
    }
  }
};

namespace detail {

template <int dim>
CsrMatrix assemble_cellwise(
    const FESpace<dim>& sp, const MeshFrame<dim>& frame, int quad_degree,
    const std::function<void(int e, int q, const Vec<dim>& x, const Eigen::VectorXd& chi,
                             const Eigen::Matrix<double, Eigen::Dynamic, dim>& grad_phys,
                             double weight, Eigen::MatrixXd& local)>& kernel) {
  const CurvedMesh<dim>& cm = *frame.mesh;
  const int npe = cm.nodes_per_element();
  BasisCache<dim> cache(cm.ref, quadrature_for<dim>(quad_degree));
  const int nq = cache.rule.size();

  const int n_chunks = thread_count();
  std::vector<std::vector<Triplet>> buffers(std::max(1, std::min(n_chunks, cm.n_elements())));
  run_chunks(cm.n_elements(), n_chunks, [&](int chunk, int begin, int end) {
    auto& buf = buffers[chunk];
    Eigen::MatrixXd local(npe, npe);
    Eigen::Matrix<double, Eigen::Dynamic, dim> grad_phys(npe, dim);
    for (int e = begin; e < end; ++e) {
      local.setZero();
      for (int q = 0; q < nq; ++q) {
        const Mat<dim> J = frame.jacobian(e, cache.rule.points[q]);
        const double det = J.determinant();
        if (det <= 0)
          throw ValidationError("assemble: inverted element " + std::to_string(e));
        const Mat<dim> Jinv = J.inverse();
        grad_phys = cache.grads[q] * Jinv;
        Vec<dim> x = Vec<dim>::Zero();
        for (int l = 0; l < npe; ++l) x += cache.vals[q][l] * frame.node(e, l);
        kernel(e, q, x, cache.vals[q], grad_phys, cache.rule.weights[q] * det, local);
      }
      for (int i = 0; i < npe; ++i)
        for (int j = 0; j < npe; ++j)
          if (local(i, j) != 0.0) buf.push_back({sp.dof(e, i), sp.dof(e, j), local(i, j)});
    }
  });

  std::vector<Triplet> trips;
  for (auto& b : buffers) trips.insert(trips.end(), b.begin(), b.end());
  return CsrMatrix::from_triplets(sp.n_dofs, sp.n_dofs, trips);
}

}  // namespace detail

template <int dim>
CsrMatrix assemble_mass(const FESpace<dim>& sp, const MeshFrame<dim>& frame,
                        int quad_degree = -1) {
  if (quad_degree < 0) quad_degree = 2 * sp.order + 2;
  return detail::assemble_cellwise<dim>(
      sp, frame, quad_degree,
      [](int, int, const Vec<dim>&, const Eigen::VectorXd& chi,
         const Eigen::Matrix<double, Eigen::Dynamic, dim>&, double w, Eigen::MatrixXd& local) {
        local.noalias() += w * (chi * chi.transpose());
      });
}

// a^h: A grad-grad + (B - w) advection + (C - div w) reaction. The velocity
// field may be null (no mesh motion); geometry is needed only in lifted
// coefficient mode.
template <int dim>
CsrMatrix assemble_operator(const FESpace<dim>& sp, const MeshFrame<dim>& frame,
                            const CoefficientField<dim>& coeffs, const NodalField<dim>* velocity,
                            const LevelSetGeometry<dim>* geom = nullptr, int quad_degree = -1) {
  if (quad_degree < 0) quad_degree = 2 * sp.order + 2;
  if (!coeffs.A) throw Error("assemble_operator: missing diffusion coefficient");
  if (coeffs.eval_mode == EvalMode::Lifted && !geom)
    throw Error("assemble_operator: lifted coefficient mode needs the geometry");
  const CurvedMesh<dim>& cm = *frame.mesh;
  const double t = frame.time;
  const int npe = cm.nodes_per_element();

  return detail::assemble_cellwise<dim>(
      sp, frame, quad_degree,
      [&, t, npe](int e, int, const Vec<dim>& x, const Eigen::VectorXd& chi,
                  const Eigen::Matrix<double, Eigen::Dynamic, dim>& grad_phys, double w,
                  Eigen::MatrixXd& local) {
        const int region = cm.base.elements[e].region;
        Vec<dim> x_eval = x;
        if (coeffs.eval_mode == EvalMode::Lifted) x_eval = lift_point(frame, *geom, e, x);
        const double A = coeffs.A(t, x_eval, region);
        Vec<dim> adv = Vec<dim>::Zero();
        if (coeffs.B) adv = coeffs.B(t, x_eval);
        double react = coeffs.C ? coeffs.C(t, x_eval) : 0.0;
        if (velocity) {
          Vec<dim> wq = Vec<dim>::Zero();
          double divw = 0;
          for (int l = 0; l < npe; ++l) {
            const Vec<dim>& wl = (*velocity)[cm.elem_nodes[e][l]];
            wq += chi[l] * wl;
            divw += wl.dot(grad_phys.row(l));
          }
          adv -= wq;
          react -= divw;
        }
        local.noalias() += (w * A) * (grad_phys * grad_phys.transpose());
        local.noalias() += w * (chi * (grad_phys * adv).transpose());
        local.noalias() += (w * react) * (chi * chi.transpose());
      });
}

// lambda^h: mass form weighted by div w of the interpolated mesh velocity.
template <int dim>
CsrMatrix assemble_lambda(const FESpace<dim>& sp, const MeshFrame<dim>& frame,
                          const NodalField<dim>& velocity, int quad_degree = -1) {
  if (quad_degree < 0) quad_degree = 2 * sp.order + 2;
  const CurvedMesh<dim>& cm = *frame.mesh;
  const int npe = cm.nodes_per_element();
  return detail::assemble_cellwise<dim>(
      sp, frame, quad_degree,
      [&, npe](int e, int, const Vec<dim>&, const Eigen::VectorXd& chi,
               const Eigen::Matrix<double, Eigen::Dynamic, dim>& grad_phys, double w,
               Eigen::MatrixXd& local) {
        double divw = 0;
        for (int l = 0; l < npe; ++l)
          divw += (velocity)[cm.elem_nodes[e][l]].dot(grad_phys.row(l));
        local.noalias() += (w * divw) * (chi * chi.transpose());
      });
}

// l^h. Interpolated mode replaces f and G by their nodal interpolants on the
// discrete domain (unit lift Jacobians); lifted mode evaluates the data at
// lifted points weighted by the lift Jacobians.
template <int dim>
Vector assemble_load(const FESpace<dim>& sp, const MeshFrame<dim>& frame,
                     const CoefficientField<dim>& coeffs, const LevelSetGeometry<dim>& geom,
                     DataMode mode, int quad_degree = -1) {
  if (quad_degree < 0) quad_degree = 2 * sp.order + 2;
  const CurvedMesh<dim>& cm = *frame.mesh;
  const double t = frame.time;
  const int npe = cm.nodes_per_element();
  Vector rhs = Vector::Zero(sp.n_dofs);

  if (coeffs.f) {
    BasisCache<dim> cache(cm.ref, quadrature_for<dim>(quad_degree));
    std::vector<double> fnode(npe);
    for (int e = 0; e < cm.n_elements(); ++e) {
      const int region = cm.base.elements[e].region;
      if (mode == DataMode::Interpolated)
        for (int l = 0; l < npe; ++l)
          fnode[l] = coeffs.f(t, frame.node(e, l), region);
      for (int q = 0; q < cache.rule.size(); ++q) {
        const double det = frame.jacobian(e, cache.rule.points[q]).determinant();
        double fq;
        if (mode == DataMode::Interpolated) {
          fq = 0;
          for (int l = 0; l < npe; ++l) fq += fnode[l] * cache.vals[q][l];
        } else {
          Vec<dim> x = Vec<dim>::Zero();
          for (int l = 0; l < npe; ++l) x += cache.vals[q][l] * frame.node(e, l);
          const Vec<dim> lx = lift_point_ref(frame, geom, e, cache.rule.points[q], x);
          const double Jlift = lift_jacobian(frame, geom, e, cache.rule.points[q]).determinant();
          fq = coeffs.f(t, lx, region) * Jlift;
        }
        const double w = cache.rule.weights[q] * det;
        for (int i = 0; i < npe; ++i) rhs[sp.dof(e, i)] += w * fq * cache.vals[q][i];
      }
    }
  }

  if (coeffs.G) {
    auto frule = quadrature_for<dim == 2 ? 1 : 2>(quad_degree);
    for (const auto& f : cm.base.facets) {
      if (f.cls != FacetClass::Interface) continue;
      const int side = cm.base.elements[f.elem[0]].region == 1 ? 0 : 1;
      const int e = f.elem[side];
      auto param = facet_parameterization(cm, f, side);
      const auto Tref = param.tangents();

      // nodes supported on this facet (their basis restrictions span it)
      std::vector<int> facet_nodes;
      std::vector<double> gnode;
      if (mode == DataMode::Interpolated) {
        const auto& el = cm.base.elements[e];
        std::array<bool, dim + 1> on_facet{};
        for (int l = 0; l <= dim; ++l)
          for (int i = 0; i < dim; ++i) on_facet[l] = on_facet[l] || (el.v[l] == f.v[i]);
        const auto& ref_nodes = cm.ref.nodes();
        for (int l = 0; l < npe; ++l) {
          auto idx = lattice_index<dim>(ref_nodes[l], cm.k_geo);
          bool supported = true;
          for (int i = 0; i <= dim; ++i)
            if (idx[i] > 0 && !on_facet[i]) supported = false;
          if (supported) {
            facet_nodes.push_back(l);
            gnode.push_back(coeffs.G(t, frame.node(e, l)));
          }
        }
      }

      for (int q = 0; q < frule.size(); ++q) {
        const Vec<dim> xhat = param.map(frule.points[q]);
        const Eigen::VectorXd chi = cm.ref.eval_unchecked(xhat);
        const Mat<dim> J = frame.jacobian(e, xhat);
        Eigen::Matrix<double, dim, dim - 1> tang = J * Tref;
        const double ds = std::sqrt((tang.transpose() * tang).determinant());
        double gq;
        if (mode == DataMode::Interpolated) {
          gq = 0;
          for (size_t il = 0; il < facet_nodes.size(); ++il)
            gq += gnode[il] * chi[facet_nodes[il]];
        } else {
          Vec<dim> x = Vec<dim>::Zero();
          for (int l = 0; l < npe; ++l) x += chi[l] * frame.node(e, l);
          const Vec<dim> lx = lift_point_ref(frame, geom, e, xhat, x);
          const Mat<dim> dL = lift_jacobian(frame, geom, e, xhat);
          Eigen::Matrix<double, dim, dim - 1> lt = dL * tang;
          const double mu = std::sqrt((lt.transpose() * lt).determinant()) / ds;
          gq = coeffs.G(t, lx) * mu;
        }
        const double w = frule.weights[q] * ds;
        for (int i = 0; i < npe; ++i) rhs[sp.dof(e, i)] += w * gq * chi[i];
      }
    }
  }

  return rhs;
}

template <int dim>
void apply_dirichlet(CsrMatrix& A, Vector& rhs, const FESpace<dim>& sp,
                     double boundary_value = 0.0) {
  A.apply_dirichlet(rhs, sp.dirichlet, boundary_value);
}

}  // namespace movefem
