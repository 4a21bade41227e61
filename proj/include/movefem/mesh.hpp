// Interface-fitted simplicial meshes: storage, facet derivation and the
// structural validation report (conformity, facet/region labelling, vertex
// placement on the interface, shape regularity).
#pragma once

#include "movefem/common.hpp"
#include "movefem/level_set.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>

namespace movefem {

enum class FacetClass { Interior, Interface, OuterBoundary };

template <int dim>
struct Element {
  std::array<int, dim + 1> v{};
  int region = 0;  // 1 inside the interface, 2 outside
};

template <int dim>
struct Facet {
  std::array<int, dim> v{};       // sorted vertex ids
  std::array<int, 2> elem{-1, -1};
  std::array<int, 2> local{-1, -1};  // opposite local vertex in each element
  FacetClass cls = FacetClass::Interior;
};

template <int dim>
struct LinearMesh {
  std::vector<Vec<dim>> vertices;
  std::vector<Element<dim>> elements;
  std::vector<Facet<dim>> facets;
  std::vector<std::uint8_t> vertex_on_interface;
  Box<dim> box;
  double h = 0.0;

  std::array<Vec<dim>, dim + 1> element_vertices(int e) const {
    std::array<Vec<dim>, dim + 1> vs;
    for (int i = 0; i <= dim; ++i) vs[i] = vertices[elements[e].v[i]];
    return vs;
  }

  Vec<dim> centroid(int e) const {
    Vec<dim> c = Vec<dim>::Zero();
    for (int i = 0; i <= dim; ++i) c += vertices[elements[e].v[i]];
    return c / (dim + 1);
  }

  double element_measure(int e) const {
    Mat<dim> A;
    const auto& el = elements[e];
    for (int j = 0; j < dim; ++j) A.col(j) = vertices[el.v[j + 1]] - vertices[el.v[0]];
    double f = 1.0;
    for (int i = 2; i <= dim; ++i) f *= i;
    return A.determinant() / f;
  }

  double element_diameter(int e) const {
    double d = 0;
    for (int i = 0; i <= dim; ++i)
      for (int j = i + 1; j <= dim; ++j)
        d = std::max(d, (vertices[elements[e].v[i]] - vertices[elements[e].v[j]]).norm());
    return d;
  }

  int interface_vertex_count(int e) const {
    int n = 0;
    for (int i = 0; i <= dim; ++i) n += vertex_on_interface[elements[e].v[i]] ? 1 : 0;
    return n;
  }

  // Fix orientation, derive facets from element adjacency (classification by
  // region labels), compute h. Call after any structural edit.
  void finalize() {
    if (vertex_on_interface.size() != vertices.size())
      vertex_on_interface.assign(vertices.size(), 0);
    for (int e = 0; e < static_cast<int>(elements.size()); ++e)
      if (element_measure(e) < 0) std::swap(elements[e].v[dim - 1], elements[e].v[dim]);

    std::map<std::array<int, dim>, int> table;
    facets.clear();
    for (int e = 0; e < static_cast<int>(elements.size()); ++e) {
      for (int opp = 0; opp <= dim; ++opp) {
        std::array<int, dim> key;
        int p = 0;
        for (int i = 0; i <= dim; ++i)
          if (i != opp) key[p++] = elements[e].v[i];
        std::sort(key.begin(), key.end());
        auto [it, inserted] = table.try_emplace(key, static_cast<int>(facets.size()));
        if (inserted) {
          Facet<dim> f;
          f.v = key;
          f.elem[0] = e;
          f.local[0] = opp;
          facets.push_back(f);
        } else {
          Facet<dim>& f = facets[it->second];
          if (f.elem[1] != -1) throw ValidationError("mesh: facet shared by more than two elements");
          f.elem[1] = e;
          f.local[1] = opp;
        }
      }
    }
    for (auto& f : facets) {
      if (f.elem[1] == -1)
        f.cls = FacetClass::OuterBoundary;
      else if (elements[f.elem[0]].region != elements[f.elem[1]].region)
        f.cls = FacetClass::Interface;
      else
        f.cls = FacetClass::Interior;
    }
    h = 0;
    for (int e = 0; e < static_cast<int>(elements.size()); ++e)
      h = std::max(h, element_diameter(e));
  }
};

struct MeshReport {
  int n_vertices = 0;
  int n_elements = 0;
  int n_interface_facets = 0;
  double h_max = 0.0;
  double h_min = 0.0;
  double shape_regularity = 0.0;  // min over elements of inradius/diameter
  double min_det_ratio = 1.0;     // curved meshes: min/max det(grad F_K)
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }

  std::string to_string() const {
    std::ostringstream os;
    os << "vertices " << n_vertices << ", elements " << n_elements << ", interface facets "
       << n_interface_facets << "\n";
    os << "h_max " << h_max << ", h_min " << h_min << ", shape regularity " << shape_regularity
       << ", det ratio " << min_det_ratio << "\n";
    os << "violations: " << violations.size() << "\n";
    for (const auto& v : violations) os << "  - " << v << "\n";
    return os.str();
  }
};

template <int dim>
double simplex_inradius(const std::array<Vec<dim>, dim + 1>& vs) {
  Mat<dim> A;
  for (int j = 0; j < dim; ++j) A.col(j) = vs[j + 1] - vs[0];
  double fact = 1.0;
  for (int i = 2; i <= dim; ++i) fact *= i;
  const double volume = std::abs(A.determinant()) / fact;
  // surface measure of all facets
  double surface = 0;
  for (int opp = 0; opp <= dim; ++opp) {
    std::array<Vec<dim>, dim> fv;
    int p = 0;
    for (int i = 0; i <= dim; ++i)
      if (i != opp) fv[p++] = vs[i];
    if constexpr (dim == 2) {
      surface += (fv[1] - fv[0]).norm();
    } else if constexpr (dim == 3) {
      surface += 0.5 * (fv[1] - fv[0]).cross(fv[2] - fv[0]).norm();
    } else {
      surface += 1.0;
    }
  }
  return dim * volume / surface;
}

// Structural validation of a linear mesh against the fitted-mesh assumptions.
// The geometry pointer may be null, in which case interface-placement and
// region-sign checks are skipped.
template <int dim>
MeshReport validate(const LinearMesh<dim>& mesh, const LevelSetGeometry<dim>* geom,
                    double t = 0.0) {
  MeshReport rep;
  rep.n_vertices = static_cast<int>(mesh.vertices.size());
  rep.n_elements = static_cast<int>(mesh.elements.size());
  rep.h_min = 1e300;
  double total = 0.0;
  for (int e = 0; e < rep.n_elements; ++e) {
    const double d = mesh.element_diameter(e);
    rep.h_max = std::max(rep.h_max, d);
    rep.h_min = std::min(rep.h_min, d);
    const double m = mesh.element_measure(e);
    total += m;
    if (m <= 0) rep.violations.push_back("element " + std::to_string(e) + " has non-positive measure");
    const double rho = simplex_inradius<dim>(mesh.element_vertices(e)) / d;
    rep.shape_regularity = (e == 0) ? rho : std::min(rep.shape_regularity, rho);
    if (mesh.elements[e].region != 1 && mesh.elements[e].region != 2)
      rep.violations.push_back("element " + std::to_string(e) + " has invalid region label");
    if (mesh.interface_vertex_count(e) == dim + 1)
      rep.violations.push_back("M5: element " + std::to_string(e) +
                               " has all vertices on the interface");
  }
  if (std::abs(total - mesh.box.measure()) > 1e-10)
    rep.violations.push_back("M2: element measures do not partition the box (sum " +
                             std::to_string(total) + ")");

  for (size_t fi = 0; fi < mesh.facets.size(); ++fi) {
    const auto& f = mesh.facets[fi];
    if (f.cls == FacetClass::Interface) ++rep.n_interface_facets;
    if (f.cls == FacetClass::OuterBoundary) {
      for (int i = 0; i < dim; ++i)
        if (!mesh.box.on_boundary(mesh.vertices[f.v[i]]))
          rep.violations.push_back("M2: boundary facet " + std::to_string(fi) +
                                   " not on the outer boundary");
    }
    // M5 forward and converse in terms of the on-interface vertex flags.
    bool all_on = true;
    for (int i = 0; i < dim; ++i) all_on = all_on && mesh.vertex_on_interface[f.v[i]];
    if (f.cls == FacetClass::Interface && !all_on)
      rep.violations.push_back("M5: interface facet " + std::to_string(fi) +
                               " has a vertex off the interface");
    if (f.cls != FacetClass::Interface && all_on)
      rep.violations.push_back("M5: facet " + std::to_string(fi) +
                               " has all vertices on the interface but is not an interface facet");
  }

  if (geom) {
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
      const double p = std::abs(geom->phi(t, mesh.vertices[v]));
      if (mesh.vertex_on_interface[v] && p > 1e-12)
        rep.violations.push_back("M5: vertex " + std::to_string(v) +
                                 " flagged on interface but |phi| = " + std::to_string(p));
    }
    for (int e = 0; e < rep.n_elements; ++e) {
      const double pc = geom->phi(t, mesh.centroid(e));
      const int want = pc < 0 ? 1 : 2;
      if (mesh.elements[e].region != want)
        rep.violations.push_back("M1: element " + std::to_string(e) +
                                 " region label disagrees with the level-set sign at its centroid");
    }
  }
  return rep;
}

}  // namespace movefem
