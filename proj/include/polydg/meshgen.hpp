#pragma once

#include <cstdint>
#include <vector>

#include "polydg/mesh.hpp"

namespace polydg {

/// Unit square split into n x n cells, each cut along its main diagonal.
/// `jitter` moves interior vertices by up to jitter * h per coordinate.
SimplicialMesh unit_square_mesh(int n, double jitter = 0.0, std::uint64_t seed = 1);

/// Unit cube split into n^3 cells of six Kuhn tetrahedra each.
SimplicialMesh unit_cube_mesh(int n, double jitter = 0.0, std::uint64_t seed = 1);

/// Groups simplices by the b^d axis-aligned blocks containing their centroids.
std::vector<int> block_agglomeration(const SimplicialMesh& mesh, int blocks_per_side);

/// n_elements facet-connected clusters grown breadth-first from seeded random
/// simplices, one layer per cluster in turn.
std::vector<int> seeded_agglomeration(const SimplicialMesh& mesh, int n_elements, std::uint64_t seed = 1);

}  // namespace polydg
