// Conforming scalar finite element space on a curved mesh. Degrees of freedom
// live on the shared geometric nodes (so interface nodes carry a single dof)
// and are numbered lexicographically by their t = 0 coordinates; the numbering
// is frozen across mesh motion, which is what makes coefficient vectors
// comparable between time levels.
#pragma once

#include "movefem/isoparametric.hpp"

#include <numeric>

namespace movefem {

template <int dim>
struct FESpace {
  const CurvedMesh<dim>* mesh = nullptr;
  int order = 1;
  std::vector<int> node_to_dof;
  std::vector<int> dof_to_node;
  std::vector<std::uint8_t> dirichlet;  // per dof: node on the outer boundary
  int n_dofs = 0;

  int dof(int e, int local) const { return node_to_dof[mesh->elem_nodes[e][local]]; }
};

template <int dim>
FESpace<dim> build_space(const CurvedMesh<dim>& mesh, int k) {
  if (k != mesh.k_geo) throw Error("build_space: order must match the geometric order");
  FESpace<dim> sp;
  sp.mesh = &mesh;
  sp.order = k;
  sp.n_dofs = mesh.n_nodes();
  sp.dof_to_node.resize(sp.n_dofs);
  std::iota(sp.dof_to_node.begin(), sp.dof_to_node.end(), 0);
  std::sort(sp.dof_to_node.begin(), sp.dof_to_node.end(), [&](int a, int b) {
    const auto& pa = mesh.nodes[a];
    const auto& pb = mesh.nodes[b];
    for (int i = 0; i < dim; ++i) {
      if (pa[i] < pb[i]) return true;
      if (pa[i] > pb[i]) return false;
    }
    return a < b;
  });
  sp.node_to_dof.assign(sp.n_dofs, -1);
  for (int d = 0; d < sp.n_dofs; ++d) sp.node_to_dof[sp.dof_to_node[d]] = d;
  sp.dirichlet.assign(sp.n_dofs, 0);
  for (int g = 0; g < sp.n_dofs; ++g)
    if (mesh.base.box.on_boundary(mesh.nodes[g])) sp.dirichlet[sp.node_to_dof[g]] = 1;
  return sp;
}

// Nodal interpolation at the frame's node positions.
template <int dim>
Vector interpolate(const FESpace<dim>& sp, const MeshFrame<dim>& frame,
                   const std::function<double(const Vec<dim>&)>& g) {
  Vector u(sp.n_dofs);
  for (int d = 0; d < sp.n_dofs; ++d) u[d] = g((*frame.coords)[sp.dof_to_node[d]]);
  return u;
}

template <int dim>
Vector interpolate(const FESpace<dim>& sp, const std::function<double(const Vec<dim>&)>& g) {
  return interpolate(sp, MeshFrame<dim>(*sp.mesh), g);
}

// Evaluate the FE function with coefficients u at a reference point of an
// element, given precomputed basis values.
template <int dim>
double fe_value(const FESpace<dim>& sp, const Vector& u, int e, const Eigen::VectorXd& basis) {
  double v = 0;
  for (int l = 0; l < sp.mesh->nodes_per_element(); ++l) v += u[sp.dof(e, l)] * basis[l];
  return v;
}

}  // namespace movefem
