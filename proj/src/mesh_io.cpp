#include "movefem/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace movefem {

namespace {

const char* facet_class_name(FacetClass c) {
  switch (c) {
    case FacetClass::Interior:
      return "interior";
    case FacetClass::Interface:
      return "interface";
    case FacetClass::OuterBoundary:
      return "outer-boundary";
  }
  return "?";
}

FacetClass facet_class_from(const std::string& s) {
  if (s == "interior") return FacetClass::Interior;
  if (s == "interface") return FacetClass::Interface;
  if (s == "outer-boundary") return FacetClass::OuterBoundary;
  throw Error("mesh file: unknown facet class '" + s + "'");
}

struct GmshElement {
  int type = 0;
  int physical = 0;
  std::vector<int> nodes;
};

struct GmshFile {
  std::vector<std::array<double, 3>> nodes;
  std::vector<GmshElement> elements;
  std::map<int, int> node_index;  // gmsh node id -> 0-based index
};

GmshFile read_gmsh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("import_msh: cannot open '" + path + "'");
  GmshFile file;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("$MeshFormat", 0) == 0) {
      double version;
      int file_type, data_size;
      in >> version >> file_type >> data_size;
      if (version < 2.0 || version >= 3.0 || file_type != 0)
        throw Error("import_msh: only ASCII msh version 2.x is supported");
      std::getline(in, line);
    } else if (line.rfind("$Nodes", 0) == 0) {
      int n;
      in >> n;
      for (int i = 0; i < n; ++i) {
        int id;
        std::array<double, 3> x{};
        in >> id >> x[0] >> x[1] >> x[2];
        file.node_index[id] = static_cast<int>(file.nodes.size());
        file.nodes.push_back(x);
      }
      std::getline(in, line);
    } else if (line.rfind("$Elements", 0) == 0) {
      int n;
      in >> n;
      for (int i = 0; i < n; ++i) {
        int id, type, ntags;
        in >> id >> type >> ntags;
        GmshElement el;
        el.type = type;
        if (ntags < 1) throw Error("import_msh: element " + std::to_string(id) +
                                   " is missing its physical tag");
        for (int tg = 0; tg < ntags; ++tg) {
          int tag;
          in >> tag;
          if (tg == 0) el.physical = tag;
        }
        int nn = 0;
        switch (type) {
          case 1.: nn = 2; break;   // line
          case 2: nn = 3; break;    // triangle
          case 4: nn = 4; break;    // tetrahedron
          case 15: nn = 1; break;   // point (ignored later)
          default:
            throw Error("import_msh: unsupported element type " + std::to_string(type));
        }
        el.nodes.resize(nn);
        for (int k = 0; k < nn; ++k) in >> el.nodes[k];
        file.elements.push_back(el);
      }
      std::getline(in, line);
    }
  }
  if (file.nodes.empty() || file.elements.empty())
    throw Error("import_msh: missing $Nodes or $Elements section");
  return file;
}

}  // namespace

template <int dim>
void write_native(const LinearMesh<dim>& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_native: cannot open '" + path + "'");
  out << "movefem-mesh " << dim << " 1\n";
  out << "vertices " << mesh.vertices.size() << "\n";
  out << std::setprecision(17);
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    for (int i = 0; i < dim; ++i) out << mesh.vertices[v][i] << " ";
    out << int(mesh.vertex_on_interface[v]) << "\n";
  }
  out << "elements " << mesh.elements.size() << "\n";
  for (const auto& el : mesh.elements) {
    for (int i = 0; i <= dim; ++i) out << el.v[i] << " ";
    out << el.region << "\n";
  }
  out << "facets " << mesh.facets.size() << "\n";
  for (const auto& f : mesh.facets) {
    for (int i = 0; i < dim; ++i) out << f.v[i] << " ";
    out << facet_class_name(f.cls) << "\n";
  }
}

template <int dim>
LinearMesh<dim> read_native(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_native: cannot open '" + path + "'");
  std::string magic;
  int d, k;
  in >> magic >> d >> k;
  if (magic != "movefem-mesh") throw Error("read_native: not a movefem mesh file");
  if (d != dim) throw Error("read_native: file dimension mismatch");
  std::string block;
  size_t n;
  LinearMesh<dim> mesh;
  in >> block >> n;
  if (block != "vertices") throw Error("read_native: expected vertex block");
  mesh.vertices.resize(n);
  mesh.vertex_on_interface.resize(n);
  for (size_t v = 0; v < n; ++v) {
    for (int i = 0; i < dim; ++i) in >> mesh.vertices[v][i];
    int flag;
    in >> flag;
    mesh.vertex_on_interface[v] = static_cast<std::uint8_t>(flag);
  }
  in >> block >> n;
  if (block != "elements") throw Error("read_native: expected element block");
  mesh.elements.resize(n);
  for (size_t e = 0; e < n; ++e) {
    for (int i = 0; i <= dim; ++i) in >> mesh.elements[e].v[i];
    in >> mesh.elements[e].region;
  }
  in >> block >> n;
  if (block != "facets") throw Error("read_native: expected facet block");
  std::vector<std::pair<std::array<int, dim>, FacetClass>> listed(n);
  for (size_t f = 0; f < n; ++f) {
    for (int i = 0; i < dim; ++i) in >> listed[f].first[i];
    std::string cls;
    in >> cls;
    listed[f].second = facet_class_from(cls);
  }
  if (!in) throw Error("read_native: truncated file");
  mesh.finalize();
  // cross-check listed facet classes against the derived classification
  std::map<std::array<int, dim>, FacetClass> derived;
  for (const auto& f : mesh.facets) derived[f.v] = f.cls;
  for (auto [key, cls] : listed) {
    std::sort(key.begin(), key.end());
    auto it = derived.find(key);
    if (it == derived.end()) throw ValidationError("read_native: listed facet not in mesh");
    if (it->second != cls)
      throw ValidationError("read_native: facet classification disagrees with region labels");
  }
  return mesh;
}

int probe_mesh_dimension(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".msh") {
    auto file = read_gmsh_file(path);
    for (const auto& el : file.elements)
      if (el.type == 4) return 3;
    return 2;
  }
  std::ifstream in(path);
  if (!in) throw Error("probe_mesh_dimension: cannot open '" + path + "'");
  std::string magic;
  int d;
  in >> magic >> d;
  if (magic != "movefem-mesh") throw Error("probe_mesh_dimension: unknown mesh format");
  return d;
}

template <int dim>
LinearMesh<dim> import_msh(const std::string& path, const LevelSetGeometry<dim>* geom) {
  auto file = read_gmsh_file(path);
  constexpr int bulk_type = (dim == 2) ? 2 : 4;
  constexpr int facet_type = (dim == 2) ? 1 : 2;

  LinearMesh<dim> mesh;
  for (const auto& xyz : file.nodes) {
    Vec<dim> x;
    for (int i = 0; i < dim; ++i) x[i] = xyz[i];
    mesh.vertices.push_back(x);
  }
  std::vector<std::pair<std::array<int, dim>, int>> tagged_facets;
  for (const auto& el : file.elements) {
    if (el.type == bulk_type) {
      if (el.physical != 1 && el.physical != 2)
        throw ValidationError("import_msh: bulk element with physical tag " +
                              std::to_string(el.physical) + "; expected tag 1 or 2");
      Element<dim> m;
      for (int i = 0; i <= dim; ++i) m.v[i] = file.node_index.at(el.nodes[i]);
      m.region = el.physical;
      mesh.elements.push_back(m);
    } else if (el.type == facet_type) {
      if (el.physical != 3 && el.physical != 4)
        throw ValidationError("import_msh: facet with physical tag " +
                              std::to_string(el.physical) + "; expected tag 3 or 4");
      std::array<int, dim> f;
      for (int i = 0; i < dim; ++i) f[i] = file.node_index.at(el.nodes[i]);
      std::sort(f.begin(), f.end());
      tagged_facets.emplace_back(f, el.physical);
    }
  }
  if (mesh.elements.empty()) throw ValidationError("import_msh: no bulk elements found");
  mesh.vertex_on_interface.assign(mesh.vertices.size(), 0);
  for (const auto& [f, tag] : tagged_facets)
    if (tag == 3)
      for (int i = 0; i < dim; ++i) mesh.vertex_on_interface[f[i]] = 1;
  mesh.finalize();

  std::map<std::array<int, dim>, FacetClass> derived;
  for (const auto& f : mesh.facets) derived[f.v] = f.cls;
  for (const auto& [key, tag] : tagged_facets) {
    auto it = derived.find(key);
    if (it == derived.end())
      throw ValidationError("import_msh: tagged facet is not a facet of the bulk mesh");
    const FacetClass want = tag == 3 ? FacetClass::Interface : FacetClass::OuterBoundary;
    if (it->second != want)
      throw ValidationError("import_msh: facet tag " + std::to_string(tag) +
                            " disagrees with the region labels");
  }

  if (geom) {
    const double budget = mesh.h * mesh.h;
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
      if (!mesh.vertex_on_interface[v]) continue;
      auto cp = closest_point(*geom, 0.0, mesh.vertices[v]);
      if (!cp.converged)
        throw ValidationError("import_msh: interface vertex projection failed");
      if (std::abs(cp.distance) > budget)
        throw ValidationError("import_msh: interface vertex " + std::to_string(v) +
                              " is " + std::to_string(std::abs(cp.distance)) +
                              " from the interface (budget h^2)");
      mesh.vertices[v] = cp.point;
    }
    mesh.finalize();
  }
  return mesh;
}

template <int dim>
void export_msh(const LinearMesh<dim>& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("export_msh: cannot open '" + path + "'");
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << std::setprecision(17);
  out << "$Nodes\n" << mesh.vertices.size() << "\n";
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    out << v + 1;
    for (int i = 0; i < dim; ++i) out << " " << mesh.vertices[v][i];
    for (int i = dim; i < 3; ++i) out << " 0";
    out << "\n";
  }
  int n_tagged = 0;
  for (const auto& f : mesh.facets)
    if (f.cls != FacetClass::Interior) ++n_tagged;
  out << "$EndNodes\n$Elements\n" << mesh.elements.size() + n_tagged << "\n";
  int id = 1;
  constexpr int bulk_type = (dim == 2) ? 2 : 4;
  constexpr int facet_type = (dim == 2) ? 1 : 2;
  for (const auto& el : mesh.elements) {
    out << id++ << " " << bulk_type << " 2 " << el.region << " " << el.region;
    for (int i = 0; i <= dim; ++i) out << " " << el.v[i] + 1;
    out << "\n";
  }
  for (const auto& f : mesh.facets) {
    if (f.cls == FacetClass::Interior) continue;
    const int tag = f.cls == FacetClass::Interface ? 3 : 4;
    out << id++ << " " << facet_type << " 2 " << tag << " " << tag;
    for (int i = 0; i < dim; ++i) out << " " << f.v[i] + 1;
    out << "\n";
  }
  out << "$EndElements\n";
}

template <int dim>
LinearMesh<dim> read_mesh(const std::string& path, const LevelSetGeometry<dim>* geom) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".msh")
    return import_msh<dim>(path, geom);
  return read_native<dim>(path);
}

template void write_native<2>(const LinearMesh<2>&, const std::string&);
template void write_native<3>(const LinearMesh<3>&, const std::string&);
template LinearMesh<2> read_native<2>(const std::string&);
template LinearMesh<3> read_native<3>(const std::string&);
template LinearMesh<2> import_msh<2>(const std::string&, const LevelSetGeometry<2>*);
template LinearMesh<3> import_msh<3>(const std::string&, const LevelSetGeometry<3>*);
template void export_msh<2>(const LinearMesh<2>&, const std::string&);
template void export_msh<3>(const LinearMesh<3>&, const std::string&);
template LinearMesh<2> read_mesh<2>(const std::string&, const LevelSetGeometry<2>*);
template LinearMesh<3> read_mesh<3>(const std::string&, const LevelSetGeometry<3>*);

}  // namespace movefem
