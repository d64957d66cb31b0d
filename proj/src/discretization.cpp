#include "polydg/discretization.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace polydg {

int Discretization::max_degree() const {
  int p = 0;
  for (const auto& e : elements) p = std::max(p, e.basis.degree());
  return p;
}

std::vector<int> expand_degrees(std::span<const int> degrees, std::size_t num_elements) {
  if (degrees.size() == 1) return std::vector<int>(num_elements, degrees[0]);
  if (degrees.size() != num_elements)
    throw std::invalid_argument("expected 1 or " + std::to_string(num_elements) + " degrees, got " +
                                std::to_string(degrees.size()));
  return {degrees.begin(), degrees.end()};
}

void finalize_offsets(Discretization& disc) {
  disc.offsets.assign(disc.elements.size() + 1, 0);
  for (std::size_t e = 0; e < disc.elements.size(); ++e)
    disc.offsets[e + 1] = disc.offsets[e] + static_cast<std::int64_t>(disc.elements[e].basis.size());
}

Discretization discretize(const PolytopicMesh& mesh, std::span<const int> degrees, Family family) {
  const int d = mesh.dim();
  const auto deg = expand_degrees(degrees, mesh.num_elements());
  Discretization disc;
  disc.dim = d;
  disc.family = family;
  disc.elements.resize(mesh.num_elements());
  std::vector<int> simplex_cell(mesh.base.num_simplices(), -1);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Element& el = mesh.elements[e];
    ElementData& ed = disc.elements[e];
    ed.basis = BasisSpec(el.box, deg[e], family);
    ed.volume = el.volume;
    ed.cell_begin = static_cast<int>(disc.cells.size());
    for (int s : el.simplices) {
      Cell c;
      c.vertices = mesh.base.simplex_vertices(s);
      c.simplex_dim = d;
      simplex_cell[s] = static_cast<int>(disc.cells.size());
      disc.cells.push_back(c);
      disc.cell_element.push_back(static_cast<int>(e));
    }
    ed.cell_end = static_cast<int>(disc.cells.size());
  }

  disc.faces.resize(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    FaceData& fd = disc.faces[f];
    fd.normal = face.normal;
    fd.owner = face.owner;
    fd.neighbor = face.neighbor;
    fd.interface = face.interface;
    fd.sub_begin = static_cast<int>(disc.subfaces.size());
    Vec centroid{};
    double measure = 0.0;
    for (std::size_t k = 0; k < face.sub_faces.size(); ++k) {
      Cell c;
      for (int i = 0; i < d; ++i) c.vertices[i] = mesh.base.vertices[face.sub_faces[k][i]];
      c.simplex_dim = d - 1;
      const double m = c.measure(d);
      Vec mid{};
      for (int i = 0; i < d; ++i) mid = axpy(1.0 / d, c.vertices[i], mid);
      centroid = axpy(m, mid, centroid);
      measure += m;
      fd.sup_owner = std::max(fd.sup_owner, mesh.base.simplex_volume(face.owner_simplices[k]));
      if (!face.is_boundary())
        fd.sup_neighbor = std::max(fd.sup_neighbor, mesh.base.simplex_volume(face.neighbor_simplices[k]));
      disc.subfaces.push_back(c);
      disc.subface_face.push_back(static_cast<int>(f));
    }
    fd.sub_end = static_cast<int>(disc.subfaces.size());
    fd.measure = measure;
    fd.barycenter = (1.0 / measure) * centroid;
  }
  for (const Interface& iface : mesh.interfaces) {
    disc.interfaces.push_back({iface.owner, iface.neighbor});
    disc.interface_faces.push_back(iface.face_ids);
  }
  finalize_offsets(disc);
  return disc;
}

std::vector<std::vector<int>> block_adjacency(const Discretization& disc) {
  std::vector<std::vector<int>> adj(disc.num_elements());
  for (std::size_t e = 0; e < adj.size(); ++e) adj[e].push_back(static_cast<int>(e));
  for (const auto& [a, b] : disc.interfaces) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adj;
}

}  // namespace polydg
