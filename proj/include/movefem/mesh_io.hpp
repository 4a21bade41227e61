// Mesh file formats.
//
// Native ASCII dump:
//   movefem-mesh <d> <k>
//   vertices <n>            x y [z] on_interface
//   elements <n>            v0 .. vd region
//   facets <n>              v0 .. v(d-1) class     (interior|interface|outer-boundary)
//
// Gmsh ASCII v2.2 subset: $Nodes and $Elements with physical tags
//   1 -> region-1 bulk, 2 -> region-2 bulk, 3 -> interface facets,
//   4 -> outer-boundary facets.
#pragma once

#include "movefem/mesh.hpp"

#include <string>

namespace movefem {

template <int dim>
void write_native(const LinearMesh<dim>& mesh, const std::string& path);

template <int dim>
LinearMesh<dim> read_native(const std::string& path);

// Peek the dimension of a native or gmsh file (gmsh: from element types).
int probe_mesh_dimension(const std::string& path);

// Import a gmsh file; geometry, when given, enforces interface-vertex
// placement by projection (movement above h^2 is an error).
template <int dim>
LinearMesh<dim> import_msh(const std::string& path, const LevelSetGeometry<dim>* geom);

template <int dim>
void export_msh(const LinearMesh<dim>& mesh, const std::string& path);

// Dispatch on extension: ".msh" goes through the gmsh reader, everything else
// through the native reader (with a snap pass when geometry is given).
template <int dim>
LinearMesh<dim> read_mesh(const std::string& path, const LevelSetGeometry<dim>* geom);

}  // namespace movefem
