#include "polydg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace polydg {

std::array<Vec, 4> SimplicialMesh::simplex_vertices(std::size_t s) const {
  std::array<Vec, 4> v{};
  for (int i = 0; i <= dim; ++i) v[i] = vertices[simplices[s][i]];
  return v;
}

double SimplicialMesh::simplex_volume(std::size_t s) const {
  const auto v = simplex_vertices(s);
  return std::abs(signed_simplex_volume(std::span(v.data(), dim + 1), dim));
}

SimplicialMesh make_simplicial_mesh(int dim, std::vector<Vec> vertices, std::vector<std::array<int, 4>> simplices) {
  if (dim != 2 && dim != 3) throw MeshError("mesh dimension must be 2 or 3");
  if (vertices.empty() || simplices.empty()) throw MeshError("mesh has no vertices or no simplices");
  Box bbox = Box::empty(dim);
  for (const auto& v : vertices) bbox.expand(v);
  double extent = 0.0;
  for (int i = 0; i < dim; ++i) extent = std::max(extent, bbox.hi[i] - bbox.lo[i]);
  const double threshold = 1e-14 * std::pow(extent, dim);

  const int nv = static_cast<int>(vertices.size());
  SimplicialMesh mesh{dim, std::move(vertices), std::move(simplices)};
  for (std::size_t s = 0; s < mesh.simplices.size(); ++s) {
    auto& simplex = mesh.simplices[s];
    for (int i = 0; i <= dim; ++i)
      if (simplex[i] < 0 || simplex[i] >= nv)
        throw MeshError("simplex " + std::to_string(s) + ": vertex index out of range");
    for (int i = dim + 1; i < 4; ++i) simplex[i] = -1;
    const auto v = mesh.simplex_vertices(s);
    const double vol = signed_simplex_volume(std::span(v.data(), dim + 1), dim);
    if (std::abs(vol) < threshold || vol == 0.0)
      throw MeshError("simplex " + std::to_string(s) + " is degenerate (volume " + std::to_string(vol) + ")");
    if (vol < 0) std::swap(simplex[0], simplex[1]);
  }
  std::vector<std::array<int, 4>> sorted = mesh.simplices;
  for (auto& s : sorted) std::sort(s.begin(), s.begin() + dim + 1);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw MeshError("duplicate simplex in mesh");
  return mesh;
}

namespace {

// Reads the next non-empty, non-comment line; returns false at EOF.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

[[noreturn]] void parse_error(const std::filesystem::path& path, std::size_t lineno, const std::string& what) {
  throw MeshError(path.string() + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

SimplicialMesh load_simplicial_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  if (!next_line(in, line, lineno)) parse_error(path, lineno, "missing header");
  int dim = 0;
  long nv = 0, ns = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> dim >> nv >> ns) || nv <= 0 || ns <= 0) parse_error(path, lineno, "expected header `dim nv ns`");
    if (dim != 2 && dim != 3) parse_error(path, lineno, "dimension must be 2 or 3");
  }
  std::vector<Vec> vertices(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!next_line(in, line, lineno)) parse_error(path, lineno, "unexpected end of file in vertex block");
    std::istringstream ss(line);
    Vec v{};
    for (int k = 0; k < dim; ++k)
      if (!(ss >> v[k])) parse_error(path, lineno, "expected " + std::to_string(dim) + " coordinates");
    if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }))
      parse_error(path, lineno, "non-finite coordinate");
    vertices[i] = v;
  }
  std::vector<std::array<int, 4>> simplices(static_cast<std::size_t>(ns));
  for (long i = 0; i < ns; ++i) {
    if (!next_line(in, line, lineno)) parse_error(path, lineno, "unexpected end of file in simplex block");
    std::istringstream ss(line);
    std::array<int, 4> s{-1, -1, -1, -1};
    for (int k = 0; k <= dim; ++k)
      if (!(ss >> s[k])) parse_error(path, lineno, "expected " + std::to_string(dim + 1) + " vertex indices");
    for (int k = 0; k <= dim; ++k)
      if (s[k] < 0 || s[k] >= nv) parse_error(path, lineno, "vertex index out of range");
    simplices[i] = s;
  }
  try {
    return make_simplicial_mesh(dim, std::move(vertices), std::move(simplices));
  } catch (const MeshError& e) {
    throw MeshError(path.string() + ": " + e.what());
  }
}

void write_simplicial_mesh(const std::filesystem::path& path, const SimplicialMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file " + path.string());
  out.precision(17);
  out << mesh.dim << ' ' << mesh.vertices.size() << ' ' << mesh.simplices.size() << '\n';
  for (const auto& v : mesh.vertices) {
    for (int k = 0; k < mesh.dim; ++k) out << (k ? " " : "") << v[k];
    out << '\n';
  }
  for (const auto& s : mesh.simplices) {
    for (int k = 0; k <= mesh.dim; ++k) out << (k ? " " : "") << s[k];
    out << '\n';
  }
}

std::vector<int> load_agglomeration_map(const std::filesystem::path& path, std::size_t num_simplices) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open agglomeration file " + path.string());
  std::vector<int> map;
  map.reserve(num_simplices);
  std::string line;
  std::size_t lineno = 0;
  while (next_line(in, line, lineno)) {
    std::istringstream ss(line);
    int e = 0;
    if (!(ss >> e) || e < 0) parse_error(path, lineno, "expected a non-negative element index");
    map.push_back(e);
  }
  if (map.size() != num_simplices)
    throw MeshError(path.string() + ": expected " + std::to_string(num_simplices) + " entries, found " +
                    std::to_string(map.size()));
  return map;
}

void write_agglomeration_map(const std::filesystem::path& path, const std::vector<int>& agg_map) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write agglomeration file " + path.string());
  for (int e : agg_map) out << e << '\n';
}

Vec Face::normal_from(int element) const {
  if (element == owner) return normal;
  return -1.0 * normal;
}

double PolytopicMesh::element_diameter(std::size_t e) const {
  std::vector<int> verts;
  for (int s : elements[e].simplices)
    for (int i = 0; i <= dim(); ++i) verts.push_back(base.simplices[s][i]);
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  double diam = 0.0;
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (std::size_t j = i + 1; j < verts.size(); ++j)
      diam = std::max(diam, norm(base.vertices[verts[i]] - base.vertices[verts[j]], dim()));
  return diam;
}

namespace {

struct FacetRecord {
  std::array<int, 3> key{-1, -1, -1};
  int simplex = 0;
  int opposite = 0;  // vertex of `simplex` not on the facet
};

struct OrientedFacet {
  int owner = 0;
  int neighbor = kBoundary;
  std::array<int, 3> key{-1, -1, -1};
  int owner_simplex = 0;
  int neighbor_simplex = -1;
  Vec normal{};
};

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

Vec facet_normal(const SimplicialMesh& mesh, const std::array<int, 3>& key, int opposite) {
  const int d = mesh.dim;
  const Vec& v0 = mesh.vertices[key[0]];
  const Vec e1 = mesh.vertices[key[1]] - v0;
  Vec n{};
  if (d == 2) {
    n[0] = e1[1];
    n[1] = -e1[0];
  } else {
    const Vec e2 = mesh.vertices[key[2]] - v0;
    n[0] = e1[1] * e2[2] - e1[2] * e2[1];
    n[1] = e1[2] * e2[0] - e1[0] * e2[2];
    n[2] = e1[0] * e2[1] - e1[1] * e2[0];
  }
  const double len = norm(n, d);
  n = (1.0 / len) * n;
  if (dot(n, mesh.vertices[opposite] - v0, d) > 0.0) n = -1.0 * n;
  return n;
}

double facet_measure(const SimplicialMesh& mesh, const std::array<int, 3>& key) {
  std::array<Vec, 3> v{};
  for (int i = 0; i < mesh.dim; ++i) v[i] = mesh.vertices[key[i]];
  return simplex_measure(std::span(v.data(), mesh.dim), mesh.dim - 1, mesh.dim);
}

// Groups one run of facets sharing (owner, neighbor) into co-hyperplanar faces.
void merge_group(const SimplicialMesh& mesh, std::span<const OrientedFacet> group, std::vector<Face>& faces) {
  constexpr double kNormalTol = 1e-9;
  constexpr double kPlaneTol = 1e-9;
  const int d = mesh.dim;
  const std::size_t first_face = faces.size();
  std::vector<Box> face_boxes;
  for (const auto& f : group) {
    bool merged = false;
    for (std::size_t i = first_face; i < faces.size() && !merged; ++i) {
      Face& face = faces[i];
      bool same_normal = true;
      for (int k = 0; k < d; ++k) same_normal = same_normal && std::abs(face.normal[k] - f.normal[k]) <= kNormalTol;
      if (!same_normal) continue;
      Box box = face_boxes[i - first_face];
      for (int k = 0; k < d; ++k) box.expand(mesh.vertices[f.key[k]]);
      const double diam = norm(box.hi - box.lo, d);
      const Vec& anchor = mesh.vertices[face.sub_faces.front()[0]];
      bool coplanar = true;
      for (int k = 0; k < d; ++k)
        coplanar = coplanar && std::abs(dot(face.normal, mesh.vertices[f.key[k]] - anchor, d)) <= kPlaneTol * diam;
      if (!coplanar) continue;
      face.sub_faces.push_back(f.key);
      face.owner_simplices.push_back(f.owner_simplex);
      if (f.neighbor != kBoundary) face.neighbor_simplices.push_back(f.neighbor_simplex);
      face.measure += facet_measure(mesh, f.key);
      face_boxes[i - first_face] = box;
      merged = true;
    }
    if (merged) continue;
    Face face;
    face.sub_faces.push_back(f.key);
    face.owner_simplices.push_back(f.owner_simplex);
    if (f.neighbor != kBoundary) face.neighbor_simplices.push_back(f.neighbor_simplex);
    face.normal = f.normal;
    face.owner = f.owner;
    face.neighbor = f.neighbor;
    face.measure = facet_measure(mesh, f.key);
    Box box = Box::empty(d);
    for (int k = 0; k < d; ++k) box.expand(mesh.vertices[f.key[k]]);
    face_boxes.push_back(box);
    faces.push_back(std::move(face));
  }
}

}  // namespace

PolytopicMesh agglomerate(const SimplicialMesh& mesh, std::vector<int> agg_map) {
  const int d = mesh.dim;
  const std::size_t ns = mesh.num_simplices();
  if (agg_map.size() != ns)
    throw MeshError("agglomeration map has " + std::to_string(agg_map.size()) + " entries for " +
                    std::to_string(ns) + " simplices");
  int n_elem = 0;
  for (int e : agg_map) {
    if (e < 0) throw MeshError("agglomeration map contains a negative element index");
    n_elem = std::max(n_elem, e + 1);
  }
  std::vector<int> count(static_cast<std::size_t>(n_elem), 0);
  for (int e : agg_map) ++count[e];
  for (int e = 0; e < n_elem; ++e)
    if (count[e] == 0) throw MeshError("agglomeration map is not surjective: element " + std::to_string(e) + " is empty");

  // Enumerate every (d-1)-facet with its incident simplex.
  std::vector<FacetRecord> facets;
  facets.reserve(ns * static_cast<std::size_t>(d + 1));
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& simplex = mesh.simplices[s];
    for (int omit = 0; omit <= d; ++omit) {
      FacetRecord r;
      int k = 0;
      for (int i = 0; i <= d; ++i)
        if (i != omit) r.key[k++] = simplex[i];
      std::sort(r.key.begin(), r.key.begin() + d);
      r.simplex = static_cast<int>(s);
      r.opposite = simplex[omit];
      facets.push_back(r);
    }
  }
  std::sort(facets.begin(), facets.end(), [](const FacetRecord& a, const FacetRecord& b) {
    return a.key != b.key ? a.key < b.key : a.simplex < b.simplex;
  });

  std::vector<int> parent(ns);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<OrientedFacet> oriented;
  for (std::size_t i = 0; i < facets.size();) {
    std::size_t j = i + 1;
    while (j < facets.size() && facets[j].key == facets[i].key) ++j;
    if (j - i > 2) throw MeshError("non-manifold facet shared by more than two simplices");
    const FacetRecord& a = facets[i];
    if (j - i == 1) {
      OrientedFacet f;
      f.owner = agg_map[a.simplex];
      f.key = a.key;
      f.owner_simplex = a.simplex;
      f.normal = facet_normal(mesh, a.key, a.opposite);
      oriented.push_back(f);
    } else {
      const FacetRecord& b = facets[i + 1];
      const int ea = agg_map[a.simplex], eb = agg_map[b.simplex];
      if (ea == eb) {
        parent[find_root(parent, a.simplex)] = find_root(parent, b.simplex);
      } else {
        const FacetRecord& own = ea < eb ? a : b;
        const FacetRecord& nbr = ea < eb ? b : a;
        OrientedFacet f;
        f.owner = agg_map[own.simplex];
        f.neighbor = agg_map[nbr.simplex];
        f.key = own.key;
        f.owner_simplex = own.simplex;
        f.neighbor_simplex = nbr.simplex;
        f.normal = facet_normal(mesh, own.key, own.opposite);
        oriented.push_back(f);
      }
    }
    i = j;
  }

  PolytopicMesh out;
  out.base = mesh;
  out.agg_map = std::move(agg_map);
  out.elements.resize(static_cast<std::size_t>(n_elem));
  for (std::size_t s = 0; s < ns; ++s) out.elements[out.agg_map[s]].simplices.push_back(static_cast<int>(s));

  std::vector<int> root_of(static_cast<std::size_t>(n_elem), -1);
  for (std::size_t s = 0; s < ns; ++s) {
    const int e = out.agg_map[s];
    const int r = find_root(parent, static_cast<int>(s));
    if (root_of[e] == -1) {
      root_of[e] = r;
    } else if (root_of[e] != r) {
      throw MeshError("element " + std::to_string(e) + " is not facet-connected");
    }
  }

  for (auto& el : out.elements) {
    el.box = Box::empty(d);
    for (int s : el.simplices) {
      for (int i = 0; i <= d; ++i) el.box.expand(mesh.vertices[mesh.simplices[s][i]]);
      el.volume += mesh.simplex_volume(s);
    }
  }

  // Boundary facets sort before interior ones of the same owner (kBoundary < 0).
  std::sort(oriented.begin(), oriented.end(), [](const OrientedFacet& a, const OrientedFacet& b) {
    if (a.owner != b.owner) return a.owner < b.owner;
    if (a.neighbor != b.neighbor) return a.neighbor < b.neighbor;
    return a.key < b.key;
  });
  for (std::size_t i = 0; i < oriented.size();) {
    std::size_t j = i + 1;
    while (j < oriented.size() && oriented[j].owner == oriented[i].owner && oriented[j].neighbor == oriented[i].neighbor)
      ++j;
    const std::size_t first = out.faces.size();
    merge_group(mesh, std::span(oriented.data() + i, j - i), out.faces);
    if (oriented[i].neighbor != kBoundary) {
      Interface iface;
      iface.owner = oriented[i].owner;
      iface.neighbor = oriented[i].neighbor;
      for (std::size_t f = first; f < out.faces.size(); ++f) {
        out.faces[f].interface = static_cast<int>(out.interfaces.size());
        iface.face_ids.push_back(static_cast<int>(f));
      }
      out.interfaces.push_back(std::move(iface));
    }
    i = j;
  }
  for (std::size_t f = 0; f < out.faces.size(); ++f) {
    out.elements[out.faces[f].owner].faces.push_back(static_cast<int>(f));
    if (!out.faces[f].is_boundary()) out.elements[out.faces[f].neighbor].faces.push_back(static_cast<int>(f));
  }
  return out;
}

PolytopicMesh identity_agglomeration(const SimplicialMesh& mesh) {
  std::vector<int> map(mesh.num_simplices());
  std::iota(map.begin(), map.end(), 0);
  return agglomerate(mesh, std::move(map));
}

std::vector<std::array<int, 4>> subdivision_for_quadrature(const PolytopicMesh& mesh, std::size_t element) {
  if (element >= mesh.num_elements()) throw std::out_of_range("subdivision_for_quadrature: element index");
  std::vector<std::array<int, 4>> out;
  for (int s : mesh.elements[element].simplices) out.push_back(mesh.base.simplices[s]);
  return out;
}

const std::vector<std::array<int, 3>>& face_subdivision(const Face& face) { return face.sub_faces; }

double sub_face_measure(const PolytopicMesh& mesh, const Face& face, std::size_t sub) {
  return facet_measure(mesh.base, face.sub_faces[sub]);
}

}  // namespace polydg
