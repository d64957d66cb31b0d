#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polydg/basis.hpp"
#include "polydg/geometry.hpp"
#include "polydg/mesh.hpp"

namespace polydg {

enum class FaceKind { Standard, SlabBottom, SlabTop };

struct ElementData {
  BasisSpec basis;
  double volume = 0.0;
  int cell_begin = 0;  // range into Discretization::cells
  int cell_end = 0;
};

struct FaceData {
  Vec normal{};  // unit, outward from owner
  Vec barycenter{};
  double measure = 0.0;
  int owner = 0;
  int neighbor = kBoundary;
  int interface = -1;
  int sub_begin = 0;  // range into Discretization::subfaces
  int sub_end = 0;
  double sup_owner = 0.0;  // largest subdivision cell of the owner touching the face
  double sup_neighbor = 0.0;
  FaceKind kind = FaceKind::Standard;

  bool is_boundary() const { return neighbor == kBoundary; }
};

/// Everything the kernels read: bases, integration cells and sub-faces,
/// face geometry and the DoF layout. Built once, shared read-only.
struct Discretization {
  int dim = 0;
  Family family = Family::TotalDegree;
  std::vector<ElementData> elements;
  std::vector<Cell> cells;
  std::vector<int> cell_element;
  std::vector<FaceData> faces;
  std::vector<Cell> subfaces;
  std::vector<int> subface_face;
  std::vector<std::array<int, 2>> interfaces;  // (owner, neighbor), owner < neighbor
  std::vector<std::vector<int>> interface_faces;
  std::vector<std::int64_t> offsets;  // DoF offsets, size num_elements() + 1

  std::size_t num_elements() const { return elements.size(); }
  std::int64_t num_dofs() const { return offsets.back(); }
  int degree(std::size_t e) const { return elements[e].basis.degree(); }
  int ndofs(std::size_t e) const { return static_cast<int>(offsets[e + 1] - offsets[e]); }
  int max_degree() const;
};

/// Per-element degrees: a single entry applies to every element.
Discretization discretize(const PolytopicMesh& mesh, std::span<const int> degrees,
                          Family family = Family::TotalDegree);

/// Element adjacency for the block pattern: for each element, the sorted
/// list of elements whose unknowns couple to it (itself included).
std::vector<std::vector<int>> block_adjacency(const Discretization& disc);

/// Recomputes DoF offsets from the element bases.
void finalize_offsets(Discretization& disc);

std::vector<int> expand_degrees(std::span<const int> degrees, std::size_t num_elements);

}  // namespace polydg
