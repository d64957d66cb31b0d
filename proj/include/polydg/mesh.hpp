#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "polydg/geometry.hpp"

namespace polydg {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neighbor marker for faces on the domain boundary.
inline constexpr int kBoundary = -1;

/// Conforming simplicial mesh in R^2 or R^3 with positively oriented simplices.
struct SimplicialMesh {
  int dim = 0;
  std::vector<Vec> vertices;
  std::vector<std::array<int, 4>> simplices;  // dim+1 entries used

  std::size_t num_simplices() const { return simplices.size(); }
  std::array<Vec, 4> simplex_vertices(std::size_t s) const;
  double simplex_volume(std::size_t s) const;
};

/// Validates and reorients; throws MeshError on out-of-range indices,
/// duplicate simplices, or simplices with volume below 1e-14 x the scale of
/// the mesh bounding box.
SimplicialMesh make_simplicial_mesh(int dim, std::vector<Vec> vertices, std::vector<std::array<int, 4>> simplices);

/// Text format: header `dim nv ns`, nv lines of dim coordinates, ns lines of
/// dim+1 zero-based vertex indices.
SimplicialMesh load_simplicial_mesh(const std::filesystem::path& path);
void write_simplicial_mesh(const std::filesystem::path& path, const SimplicialMesh& mesh);

/// One element index per line, ns lines.
std::vector<int> load_agglomeration_map(const std::filesystem::path& path, std::size_t num_simplices);
void write_agglomeration_map(const std::filesystem::path& path, const std::vector<int>& agg_map);

/// Planar (d-1)-dimensional face: a union of co-hyperplanar fine facets.
struct Face {
  std::vector<std::array<int, 3>> sub_faces;  // dim vertex indices each
  std::vector<int> owner_simplices;           // fine simplex on the owner side, per sub-face
  std::vector<int> neighbor_simplices;        // same on the neighbor side (empty on the boundary)
  Vec normal{};                               // unit, outward from owner
  int owner = 0;
  int neighbor = kBoundary;
  int interface = -1;  // index into PolytopicMesh::interfaces, -1 on the boundary
  double measure = 0.0;

  bool is_boundary() const { return neighbor == kBoundary; }
  /// Normal pointing out of `element`, which must be owner or neighbor.
  Vec normal_from(int element) const;
};

/// All faces shared by one element pair; owner < neighbor.
struct Interface {
  int owner = 0;
  int neighbor = 0;
  std::vector<int> face_ids;
};

struct Element {
  std::vector<int> simplices;
  std::vector<int> faces;
  Box box;
  double volume = 0.0;
};

/// Polytopic mesh obtained by agglomerating simplices of a fine mesh.
/// Immutable after construction.
struct PolytopicMesh {
  SimplicialMesh base;
  std::vector<int> agg_map;
  std::vector<Element> elements;
  std::vector<Face> faces;
  std::vector<Interface> interfaces;

  int dim() const { return base.dim; }
  std::size_t num_elements() const { return elements.size(); }
  /// Largest vertex-to-vertex distance within the element.
  double element_diameter(std::size_t e) const;
};

/// Builds elements, bounding boxes, faces and interfaces. Facets internal to
/// an element are dropped; facets between the same element pair (or on the
/// boundary of one element) are merged into one Face when co-hyperplanar.
/// Throws MeshError for a non-surjective map or a facet-disconnected element.
PolytopicMesh agglomerate(const SimplicialMesh& mesh, std::vector<int> agg_map);

/// One element per simplex.
PolytopicMesh identity_agglomeration(const SimplicialMesh& mesh);

/// Constituent fine simplices of an element, used as quadrature sub-elements.
std::vector<std::array<int, 4>> subdivision_for_quadrature(const PolytopicMesh& mesh, std::size_t element);

/// Simplicial sub-faces of a face.
const std::vector<std::array<int, 3>>& face_subdivision(const Face& face);

/// Measure of one sub-face of `face`.
double sub_face_measure(const PolytopicMesh& mesh, const Face& face, std::size_t sub);

}  // namespace polydg
