// Isoparametric machinery: the initial interface deformation pushing Lagrange
// nodes of interface elements onto the zero level set, curved meshes with
// shared geometric nodes, reference-map evaluation/inversion, and the
// element-wise lift onto the exact domain.
#pragma once

#include "movefem/level_set.hpp"
#include "movefem/mesh.hpp"
#include "movefem/quadrature.hpp"
#include "movefem/reference_simplex.hpp"

#include <cmath>
#include <map>

namespace movefem {

// Blending weight exponent: the deformation decays like mu^(k+2) away from
// the interface facet.
inline double deformation_weight(double mu, int k) { return std::pow(mu, k + 2); }

// The deformation on a single linear element: identity unless the element has
// at least two vertices on the interface, in which case the barycentric
// anchor on the interface chord is projected onto the zero set.
template <int dim>
Vec<dim> interface_deformation(const LinearMesh<dim>& mesh, const LevelSetGeometry<dim>& geom,
                               int e, const Vec<dim>& x, int k) {
  const auto& el = mesh.elements[e];
  std::array<bool, dim + 1> on{};
  int n_on = 0;
  for (int i = 0; i <= dim; ++i) {
    on[i] = mesh.vertex_on_interface[el.v[i]] != 0;
    n_on += on[i] ? 1 : 0;
  }
  if (n_on < 2) return x;

  const auto verts = mesh.element_vertices(e);
  const auto mu = barycentric_coords<dim>(verts, x);
  double mu_tilde = 0;
  for (int i = 0; i <= dim; ++i)
    if (on[i]) mu_tilde += mu[i];
  if (mu_tilde <= 1e-14) return x;

  Vec<dim> y = Vec<dim>::Zero();
  for (int i = 0; i <= dim; ++i)
    if (on[i]) y += (mu[i] / mu_tilde) * verts[i];
  auto cp = closest_point(geom, 0.0, y);
  if (!cp.converged) throw Error("interface_deformation: closest-point projection failed");
  return x + deformation_weight(mu_tilde, k) * (cp.point - y);
}

template <int dim>
struct CurvedMesh {
  LinearMesh<dim> base;
  int k_geo = 1;
  ReferenceSimplex<dim> ref;
  std::vector<Vec<dim>> nodes;                 // shared geometric nodes at t = 0
  std::vector<std::vector<int>> elem_nodes;    // element -> global node ids (reference order)
  std::vector<int> vertex_node;                // mesh vertex -> global node id
  std::vector<std::uint8_t> node_on_interface; // node lies on the interface
  double time = 0.0;

  explicit CurvedMesh(int k = 1) : k_geo(k), ref(k) {}

  int n_elements() const { return static_cast<int>(base.elements.size()); }
  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int nodes_per_element() const { return ref.n_nodes(); }

  bool is_interface_element(int e) const { return base.interface_vertex_count(e) >= 2; }

  std::array<bool, dim + 1> vertex_gamma_mask(int e) const {
    std::array<bool, dim + 1> on{};
    for (int i = 0; i <= dim; ++i)
      on[i] = base.vertex_on_interface[base.elements[e].v[i]] != 0;
    return on;
  }
};

// A curved mesh viewed at one point in time: same topology, possibly moved
// geometric nodes.
template <int dim>
struct MeshFrame {
  const CurvedMesh<dim>* mesh = nullptr;
  const std::vector<Vec<dim>>* coords = nullptr;
  double time = 0.0;

  MeshFrame() = default;
  MeshFrame(const CurvedMesh<dim>& m) : mesh(&m), coords(&m.nodes), time(m.time) {}
  MeshFrame(const CurvedMesh<dim>& m, const std::vector<Vec<dim>>& c, double t)
      : mesh(&m), coords(&c), time(t) {}

  const Vec<dim>& node(int e, int local) const {
    return (*coords)[mesh->elem_nodes[e][local]];
  }

  Vec<dim> map(int e, const Vec<dim>& xhat) const {
    Eigen::VectorXd chi = mesh->ref.eval_unchecked(xhat);
    Vec<dim> x = Vec<dim>::Zero();
    for (int j = 0; j < mesh->nodes_per_element(); ++j) x += chi[j] * node(e, j);
    return x;
  }

  Mat<dim> jacobian(int e, const Vec<dim>& xhat) const {
    auto g = mesh->ref.grad_unchecked(xhat);
    Mat<dim> J = Mat<dim>::Zero();
    for (int j = 0; j < mesh->nodes_per_element(); ++j)
      J += node(e, j) * g.row(j);
    return J;
  }

  // Newton inversion of the reference map, affine initial guess from vertex
  // barycentric coordinates.
  Vec<dim> invert_map(int e, const Vec<dim>& x, double tol = 1e-12, int max_iter = 30) const {
    std::array<Vec<dim>, dim + 1> verts;
    for (int i = 0; i <= dim; ++i) verts[i] = node(e, i);
    auto mu = barycentric_coords<dim>(verts, x);
    Vec<dim> xhat;
    for (int i = 0; i < dim; ++i) xhat[i] = mu[i + 1];
    for (int it = 0; it < max_iter; ++it) {
      Vec<dim> r = map(e, xhat) - x;
      if (r.norm() <= tol) return xhat;
      xhat -= jacobian(e, xhat).fullPivLu().solve(r);
    }
    if ((map(e, xhat) - x).norm() > 100 * tol)
      throw Error("invert_map: Newton iteration for the reference map failed");
    return xhat;
  }
};

// Integer lattice index of a reference node (barycentric numerators over k).
template <int dim>
std::array<int, dim + 1> lattice_index(const Vec<dim>& ref_node, int k) {
  std::array<int, dim + 1> idx{};
  int s = 0;
  for (int i = 0; i < dim; ++i) {
    idx[i + 1] = static_cast<int>(std::lround(ref_node[i] * k));
    s += idx[i + 1];
  }
  idx[0] = k - s;
  return idx;
}

// Build the curved mesh: geometric nodes are the images of the linear Lagrange
// lattice under the interface deformation. Nodes are shared through a
// (vertex, weight) key so adjacent elements agree exactly.
template <int dim>
CurvedMesh<dim> build_isoparametric(const LinearMesh<dim>& mesh, const LevelSetGeometry<dim>& geom,
                                    int k) {
  CurvedMesh<dim> cm(k);
  cm.base = mesh;
  cm.time = 0.0;
  const int npe = cm.ref.n_nodes();
  const auto& ref_nodes = cm.ref.nodes();

  std::map<std::vector<std::pair<int, int>>, int> table;
  cm.elem_nodes.assign(mesh.elements.size(), std::vector<int>(npe, -1));
  cm.vertex_node.assign(mesh.vertices.size(), -1);

  for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
    const auto& el = mesh.elements[e];
    for (int l = 0; l < npe; ++l) {
      auto idx = lattice_index<dim>(ref_nodes[l], k);
      std::vector<std::pair<int, int>> key;
      for (int i = 0; i <= dim; ++i)
        if (idx[i] > 0) key.emplace_back(el.v[i], idx[i]);
      std::sort(key.begin(), key.end());
      auto [it, inserted] = table.try_emplace(key, static_cast<int>(cm.nodes.size()));
      if (inserted) {
        Vec<dim> affine = Vec<dim>::Zero();
        bool all_on_gamma = true;
        for (auto [v, w] : key) {
          affine += (static_cast<double>(w) / k) * mesh.vertices[v];
          all_on_gamma = all_on_gamma && mesh.vertex_on_interface[v];
        }
        cm.nodes.push_back(interface_deformation(mesh, geom, e, affine, k));
        cm.node_on_interface.push_back(all_on_gamma ? 1 : 0);
      }
      cm.elem_nodes[e][l] = it->second;
      if (l <= dim) cm.vertex_node[el.v[l]] = it->second;
    }
  }

  // no inverted elements
  MeshFrame<dim> frame(cm);
  auto rule = quadrature_for<dim>(2 * k + 2);
  for (int e = 0; e < cm.n_elements(); ++e)
    for (const auto& q : rule.points)
      if (frame.jacobian(e, q).determinant() <= 0)
        throw ValidationError("build_isoparametric: inverted element " + std::to_string(e));
  return cm;
}

// Lift with the reference pre-image already known (assembly loops).
template <int dim>
Vec<dim> lift_point_ref(const MeshFrame<dim>& frame, const LevelSetGeometry<dim>& geom, int e,
                        const Vec<dim>& xhat, const Vec<dim>& x) {
  const CurvedMesh<dim>& cm = *frame.mesh;
  if (!cm.is_interface_element(e)) return x;
  const auto on = cm.vertex_gamma_mask(e);
  const auto lam = ReferenceSimplex<dim>::reference_barycentric(xhat);
  double mu_tilde = 0;
  for (int i = 0; i <= dim; ++i)
    if (on[i]) mu_tilde += lam[i];
  if (mu_tilde <= 1e-14) return x;

  Vec<dim> yhat = Vec<dim>::Zero();  // reference vertices: 0, e_1, ..., e_dim
  for (int i = 1; i <= dim; ++i)
    if (on[i]) yhat[i - 1] = lam[i] / mu_tilde;
  const Vec<dim> y = frame.map(e, yhat);
  auto cp = closest_point(geom, frame.time, y);
  if (!cp.converged) throw Error("lift_point: closest-point projection failed");
  return x + deformation_weight(mu_tilde, cm.k_geo) * (cp.point - y);
}

// Element-wise lift onto the exact domain at the frame's time: identity away
// from the interface; on interface elements the reference barycentric anchor
// is projected onto the current zero level set.
template <int dim>
Vec<dim> lift_point(const MeshFrame<dim>& frame, const LevelSetGeometry<dim>& geom, int e,
                    const Vec<dim>& x) {
  const CurvedMesh<dim>& cm = *frame.mesh;
  if (!cm.is_interface_element(e)) return x;
  const Vec<dim> xhat = frame.invert_map(e, x);
  return lift_point_ref(frame, geom, e, xhat, x);
}

// Spatial derivative of the lift at a reference point; identity away from the
// interface. Used for the lift Jacobians weighting exact data.
template <int dim>
Mat<dim> lift_jacobian(const MeshFrame<dim>& frame, const LevelSetGeometry<dim>& geom, int e,
                       const Vec<dim>& xhat) {
  const CurvedMesh<dim>& cm = *frame.mesh;
  if (!cm.is_interface_element(e)) return Mat<dim>::Identity();
  const auto on = cm.vertex_gamma_mask(e);
  const auto lam = ReferenceSimplex<dim>::reference_barycentric(xhat);
  double mu_tilde = 0;
  for (int i = 0; i <= dim; ++i)
    if (on[i]) mu_tilde += lam[i];
  if (mu_tilde <= 1e-14) return Mat<dim>::Identity();

  // gradients of the reference barycentric coordinates
  auto grad_lambda = [](int i) {
    Vec<dim> g;
    if (i == 0)
      g = -Vec<dim>::Ones();
    else {
      g = Vec<dim>::Zero();
      g[i - 1] = 1.0;
    }
    return g;
  };
  Vec<dim> mhat = Vec<dim>::Zero();
  for (int i = 0; i <= dim; ++i)
    if (on[i]) mhat += grad_lambda(i);

  Vec<dim> yhat = Vec<dim>::Zero();
  Mat<dim> dyhat = Mat<dim>::Zero();  // d(yhat)/d(xhat)
  for (int i = 1; i <= dim; ++i)
    if (on[i]) {
      yhat[i - 1] = lam[i] / mu_tilde;
      dyhat.row(i - 1) = (grad_lambda(i) / mu_tilde - lam[i] / (mu_tilde * mu_tilde) * mhat)
                             .transpose();
    }

  const Vec<dim> y = frame.map(e, yhat);
  auto cp = closest_point(geom, frame.time, y);
  if (!cp.converged) throw Error("lift_jacobian: closest-point projection failed");
  const Mat<dim> dPi = projection_derivative(geom, frame.time, cp);

  const Mat<dim> Jx = frame.jacobian(e, xhat);
  const Mat<dim> Jx_inv = Jx.inverse();
  const Mat<dim> dy_dx = frame.jacobian(e, yhat) * dyhat * Jx_inv;
  const Vec<dim> grad_mu = Jx_inv.transpose() * mhat;

  const int k = cm.k_geo;
  const double wk = deformation_weight(mu_tilde, k);
  const double dwk = (k + 2) * std::pow(mu_tilde, k + 1);
  return Mat<dim>::Identity() + dwk * (cp.point - y) * grad_mu.transpose() +
         wk * (dPi - Mat<dim>::Identity()) * dy_dx;
}

// Reference-facet parameterization of facet f seen from element side (0/1):
// corners in the order of the facet's sorted global vertices.
template <int dim>
struct FacetParam {
  std::array<Vec<dim>, dim> corners;  // reference coordinates of facet corners

  Vec<dim> map(const Vec<dim - 1>& xi) const {
    double s = 0;
    Vec<dim> x = Vec<dim>::Zero();
    for (int i = 0; i < dim - 1; ++i) {
      x += xi[i] * corners[i + 1];
      s += xi[i];
    }
    x += (1.0 - s) * corners[0];
    return x;
  }

  Eigen::Matrix<double, dim, dim - 1> tangents() const {
    Eigen::Matrix<double, dim, dim - 1> T;
    for (int i = 0; i < dim - 1; ++i) T.col(i) = corners[i + 1] - corners[0];
    return T;
  }
};

template <int dim>
FacetParam<dim> facet_parameterization(const CurvedMesh<dim>& cm, const Facet<dim>& f, int side) {
  const auto& el = cm.base.elements[f.elem[side]];
  FacetParam<dim> param;
  for (int i = 0; i < dim; ++i) {
    int local = -1;
    for (int l = 0; l <= dim; ++l)
      if (el.v[l] == f.v[i]) local = l;
    if (local < 0) throw Error("facet_parameterization: facet vertex not in element");
    Vec<dim> corner = Vec<dim>::Zero();
    if (local > 0) corner[local - 1] = 1.0;
    param.corners[i] = corner;
  }
  return param;
}

// Full validation of a curved mesh frame: linear-mesh structure, facet-map
// agreement across interface facets, node placement on the moving interface,
// exact partition of the box, Jacobian positivity.
template <int dim>
MeshReport validate_curved(const MeshFrame<dim>& frame, const LevelSetGeometry<dim>* geom) {
  const CurvedMesh<dim>& cm = *frame.mesh;
  MeshReport rep = validate(cm.base, static_cast<const LevelSetGeometry<dim>*>(nullptr));
  const double t = frame.time;

  double det_min = 1e300, det_max = 0, volume = 0;
  auto rule = quadrature_for<dim>(2 * cm.k_geo + 2);
  for (int e = 0; e < cm.n_elements(); ++e) {
    for (int q = 0; q < rule.size(); ++q) {
      const double det = frame.jacobian(e, rule.points[q]).determinant();
      det_min = std::min(det_min, det);
      det_max = std::max(det_max, det);
      volume += rule.weights[q] * det;
      if (det <= 0)
        rep.violations.push_back("curved element " + std::to_string(e) +
                                 " has non-positive Jacobian");
    }
  }
  rep.min_det_ratio = det_max > 0 ? det_min / det_max : 0.0;
  if (std::abs(volume - cm.base.box.measure()) > 1e-10)
    rep.violations.push_back("curved mesh does not exactly partition the box (volume " +
                             std::to_string(volume) + ")");

  if (geom) {
    for (int g = 0; g < cm.n_nodes(); ++g) {
      if (!cm.node_on_interface[g]) continue;
      const double p = std::abs(geom->phi(t, (*frame.coords)[g]));
      if (p > (t == 0.0 ? 1e-10 : 1e-9))
        rep.violations.push_back("interface node " + std::to_string(g) +
                                 " off the interface, |phi| = " + std::to_string(p));
    }
  }

  // cross-element agreement of the reference maps on interface facets
  auto frule = quadrature_for<dim == 2 ? 1 : 2>(3);
  for (size_t fi = 0; fi < cm.base.facets.size(); ++fi) {
    const auto& f = cm.base.facets[fi];
    if (f.cls != FacetClass::Interface) continue;
    auto p0 = facet_parameterization(cm, f, 0);
    auto p1 = facet_parameterization(cm, f, 1);
    for (const auto& xi : frule.points) {
      const Vec<dim> a = frame.map(f.elem[0], p0.map(xi));
      const Vec<dim> b = frame.map(f.elem[1], p1.map(xi));
      if ((a - b).norm() > 1e-10) {
        rep.violations.push_back("interface facet " + std::to_string(fi) +
                                 " maps disagree across elements");
        break;
      }
    }
  }
  return rep;
}

}  // namespace movefem
