// Built-in interface-fitted mesh generator for a closed level-set curve
// inside the box, without an external mesher. Strategy:
//   1. crossed-triangle background grid,
//   2. snap vertices within 0.3 * (shortest incident edge) onto the zero set,
//   3. cut the remaining sign-changing edges by inserting the crossing point,
//   4. label elements by the level-set sign at their centroid,
//   5. edge-flip pass removing non-interface facets whose vertices all sit on
//      the interface.
#pragma once

#include "movefem/mesh.hpp"

#include <cmath>
#include <map>
#include <optional>

namespace movefem {

namespace detail {

// Root of t -> phi(a + t*(b-a)) on (0,1); the endpoints have strict opposite
// signs. Bisection with Newton polish, to |phi| <= 1e-13.
template <int dim>
Vec<dim> edge_crossing(const LevelSetGeometry<dim>& geom, double t, const Vec<dim>& a,
                       const Vec<dim>& b) {
  double lo = 0.0, hi = 1.0;
  double flo = geom.phi(t, a);
  auto at = [&](double s) { return Vec<dim>(a + s * (b - a)); };
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = geom.phi(t, at(mid));
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    const Vec<dim> p = at(s);
    const double f = geom.phi(t, p);
    if (std::abs(f) < 1e-15) break;
    const double df = geom.grad_phi(t, p).dot(b - a);
    if (df == 0) break;
    s -= f / df;
    s = std::min(1.0, std::max(0.0, s));
  }
  return at(s);
}

}  // namespace detail

template <int dim>
LinearMesh<dim> generate_fitted_mesh(const LevelSetGeometry<dim>& geom, double h_target);

template <>
inline LinearMesh<2> generate_fitted_mesh<2>(const LevelSetGeometry<2>& geom, double h_target) {
  if (h_target <= 0) throw Error("generate_fitted_mesh: h_target must be positive");
  const Box<2> box;
  const int n = std::max(2, static_cast<int>(std::ceil((box.hi - box.lo) / h_target)));
  const double s = (box.hi - box.lo) / n;

  LinearMesh<2> mesh;
  mesh.box = box;
  auto grid_id = [&](int i, int j) { return i * (n + 1) + j; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      mesh.vertices.push_back(Vec<2>(box.lo + i * s, box.lo + j * s));
  const int center0 = static_cast<int>(mesh.vertices.size());
  auto center_id = [&](int i, int j) { return center0 + i * n + j; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      mesh.vertices.push_back(Vec<2>(box.lo + (i + 0.5) * s, box.lo + (j + 0.5) * s));

  std::vector<std::array<int, 3>> tris;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int c = center_id(i, j);
      const int v00 = grid_id(i, j), v10 = grid_id(i + 1, j);
      const int v01 = grid_id(i, j + 1), v11 = grid_id(i + 1, j + 1);
      tris.push_back({v00, v10, c});
      tris.push_back({v10, v11, c});
      tris.push_back({v11, v01, c});
      tris.push_back({v01, v00, c});
    }

  // --- snap ---
  const double snap_dist = 0.3 * (s / std::sqrt(2.0));
  const int nv0 = static_cast<int>(mesh.vertices.size());
  std::vector<Vec<2>> original = mesh.vertices;
  std::vector<double> phi_v(nv0);
  std::vector<std::uint8_t> on_gamma(nv0, 0);
  std::vector<double> snap_cost(nv0, 0.0);
  for (int v = 0; v < nv0; ++v) {
    phi_v[v] = geom.phi(0.0, mesh.vertices[v]);
    if (box.on_boundary(mesh.vertices[v])) continue;
    if (std::abs(phi_v[v]) <= 1e-13) {
      on_gamma[v] = 1;
      continue;
    }
    const double g = geom.grad_phi(0.0, mesh.vertices[v]).norm();
    if (g < 1e-12) continue;
    if (std::abs(phi_v[v]) / g > 2.0 * snap_dist) continue;  // certainly out of range
    auto cp = closest_point(geom, 0.0, mesh.vertices[v]);
    if (!cp.converged) continue;
    if (std::abs(cp.distance) <= snap_dist) {
      mesh.vertices[v] = cp.point;
      on_gamma[v] = 1;
      snap_cost[v] = std::abs(cp.distance);
      phi_v[v] = 0.0;
    }
  }

  // A triangle with every vertex snapped degenerates the labelling; release
  // the most expensive snap until none remain.
  for (bool again = true; again;) {
    again = false;
    for (const auto& tr : tris) {
      if (on_gamma[tr[0]] && on_gamma[tr[1]] && on_gamma[tr[2]]) {
        int worst = tr[0];
        for (int i = 1; i < 3; ++i)
          if (snap_cost[tr[i]] > snap_cost[worst]) worst = tr[i];
        if (snap_cost[worst] == 0.0)
          throw ValidationError("M5: h_target too coarse, element collapsed onto the interface");
        mesh.vertices[worst] = original[worst];
        phi_v[worst] = geom.phi(0.0, mesh.vertices[worst]);
        on_gamma[worst] = 0;
        snap_cost[worst] = 0.0;
        again = true;
      }
    }
  }

  // --- cut crossing edges ---
  auto sign_of = [&](int v) -> int {
    if (on_gamma[v]) return 0;
    return phi_v[v] < 0 ? -1 : 1;
  };
  std::map<std::pair<int, int>, int> crossing;  // edge (min,max) -> new vertex id
  auto crossing_vertex = [&](int a, int b) -> int {
    auto key = std::minmax(a, b);
    auto it = crossing.find(key);
    if (it != crossing.end()) return it->second;
    Vec<2> c = detail::edge_crossing(geom, 0.0, mesh.vertices[a], mesh.vertices[b]);
    const int id = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(c);
    on_gamma.push_back(1);
    crossing.emplace(key, id);
    return id;
  };

  for (const auto& tr : tris) {
    std::array<int, 3> sg{sign_of(tr[0]), sign_of(tr[1]), sign_of(tr[2])};
    int n_cross = 0;
    for (int i = 0; i < 3; ++i)
      if (sg[i] * sg[(i + 1) % 3] < 0) ++n_cross;

    if (n_cross == 0) {
      mesh.elements.push_back({{tr[0], tr[1], tr[2]}, 0});
    } else if (n_cross == 1) {
      // one vertex on the interface, opposite edge crossing
      int z = -1;
      for (int i = 0; i < 3; ++i)
        if (sg[i] == 0) z = i;
      if (z < 0) throw ValidationError("generate_fitted_mesh: inconsistent cut pattern");
      const int a = tr[(z + 1) % 3], b = tr[(z + 2) % 3];
      const int c = crossing_vertex(a, b);
      mesh.elements.push_back({{tr[z], a, c}, 0});
      mesh.elements.push_back({{tr[z], c, b}, 0});
    } else {
      // one vertex separated from the other two
      int apex = -1;
      for (int i = 0; i < 3; ++i)
        if (sg[i] * sg[(i + 1) % 3] < 0 && sg[i] * sg[(i + 2) % 3] < 0) apex = i;
      if (apex < 0) throw ValidationError("generate_fitted_mesh: inconsistent cut pattern");
      const int A = tr[apex], B = tr[(apex + 1) % 3], C = tr[(apex + 2) % 3];
      const int c1 = crossing_vertex(A, B), c2 = crossing_vertex(A, C);
      mesh.elements.push_back({{A, c1, c2}, 0});
      // split the quad (c1, B, C, c2) by its shorter diagonal
      const double d1 = (mesh.vertices[c1] - mesh.vertices[C]).norm();
      const double d2 = (mesh.vertices[B] - mesh.vertices[c2]).norm();
      if (d1 <= d2) {
        mesh.elements.push_back({{c1, B, C}, 0});
        mesh.elements.push_back({{c1, C, c2}, 0});
      } else {
        mesh.elements.push_back({{c1, B, c2}, 0});
        mesh.elements.push_back({{B, C, c2}, 0});
      }
    }
  }

  mesh.vertex_on_interface = on_gamma;
  for (auto& el : mesh.elements) {
    Vec<2> c = (mesh.vertices[el.v[0]] + mesh.vertices[el.v[1]] + mesh.vertices[el.v[2]]) / 3.0;
    el.region = geom.phi(0.0, c) < 0 ? 1 : 2;
  }
  mesh.finalize();

  // --- edge-flip pass: remove all-on-interface facets between same-region
  // elements (chords that the labelling placed inside one region) ---
  for (int round = 0; round < 4096; ++round) {
    int flipped = 0;
    for (const auto& f : mesh.facets) {
      if (f.cls != FacetClass::Interior) continue;
      if (!(mesh.vertex_on_interface[f.v[0]] && mesh.vertex_on_interface[f.v[1]])) continue;
      const int e0 = f.elem[0], e1 = f.elem[1];
      const int a = f.v[0], b = f.v[1];
      const int c0 = mesh.elements[e0].v[f.local[0]];
      const int c1 = mesh.elements[e1].v[f.local[1]];
      // flip is valid if the segment (c0,c1) crosses the segment (a,b)
      const Vec<2> pa = mesh.vertices[a], pb = mesh.vertices[b];
      const Vec<2> pc = mesh.vertices[c0], pd = mesh.vertices[c1];
      auto cross2 = [](const Vec<2>& u, const Vec<2>& v) { return u[0] * v[1] - u[1] * v[0]; };
      const double s1 = cross2(pb - pa, pc - pa), s2 = cross2(pb - pa, pd - pa);
      const double s3 = cross2(pd - pc, pa - pc), s4 = cross2(pd - pc, pb - pc);
      if (!(s1 * s2 < 0 && s3 * s4 < 0))
        throw ValidationError("M5: chord facet cannot be flipped; refine h_target");
      mesh.elements[e0].v = {c0, c1, a};
      mesh.elements[e1].v = {c0, c1, b};
      for (int e : {e0, e1}) {
        Vec<2> c = (mesh.vertices[mesh.elements[e].v[0]] + mesh.vertices[mesh.elements[e].v[1]] +
                    mesh.vertices[mesh.elements[e].v[2]]) /
                   3.0;
        mesh.elements[e].region = geom.phi(0.0, c) < 0 ? 1 : 2;
      }
      ++flipped;
      break;  // facet table is stale after a flip
    }
    if (flipped == 0) break;
    mesh.finalize();
  }

  auto rep = validate(mesh, &geom, 0.0);
  if (!rep.ok())
    throw ValidationError("generate_fitted_mesh: invalid mesh\n" + rep.to_string());
  return mesh;
}

}  // namespace movefem
