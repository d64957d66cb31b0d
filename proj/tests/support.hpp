#pragma once

#include <cmath>
#include <vector>

#include "polydg/mesh.hpp"

namespace testing {

using polydg::Vec;

// Unit square as two triangles split along the (0,0)-(1,1) diagonal.
inline polydg::SimplicialMesh two_triangle_square() {
  return polydg::make_simplicial_mesh(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
}

// Two unit squares [0,1]x[0,1] and [1,2]x[0,1], two triangles each.
inline polydg::SimplicialMesh two_square_strip() {
  return polydg::make_simplicial_mesh(2, {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}},
                                      {{0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4}});
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Exact integral of x^a over the unit d-simplex: prod(a_i!) / (|a| + d)!.
inline double simplex_monomial_integral(const std::vector<int>& a) {
  double num = 1.0;
  int total = 0;
  for (int e : a) {
    num *= factorial(e);
    total += e;
  }
  return num / factorial(total + static_cast<int>(a.size()));
}

}  // namespace testing

#include "polydg/meshgen.hpp"

namespace testing {

// 3x3 grid of squares: element 1 is the bottom-middle cell, element 0 wraps
// it on the left, top and right, element 2 is the top row. Elements 0 and 1
// share an interface of three faces.
inline polydg::PolytopicMesh u_shaped_mesh() {
  const auto fine = polydg::unit_square_mesh(3);
  std::vector<int> map(fine.num_simplices());
  for (std::size_t s = 0; s < fine.num_simplices(); ++s) {
    const auto v = fine.simplex_vertices(s);
    const double cx = (v[0][0] + v[1][0] + v[2][0]) / 3.0, cy = (v[0][1] + v[1][1] + v[2][1]) / 3.0;
    const int ix = static_cast<int>(cx * 3), iy = static_cast<int>(cy * 3);
    map[s] = iy == 2 ? 2 : (ix == 1 && iy == 0 ? 1 : 0);
  }
  return polydg::agglomerate(fine, map);
}

}  // namespace testing

#include "polydg/engine.hpp"

namespace testing {

// Adds the blocks of one work item into a dense row-major N x N matrix.
inline void scatter(const polydg::LocalContribution& c, const std::vector<std::int64_t>& offsets,
                    std::vector<double>& dense) {
  const std::size_t n = static_cast<std::size_t>(offsets.back());
  for (const auto& b : c.blocks()) {
    const double* v = c.block_data(b);
    for (int i = 0; i < b.rows; ++i)
      for (int j = 0; j < b.cols; ++j)
        dense[(offsets[b.row_elem] + i) * n + offsets[b.col_elem] + j] += v[i * b.cols + j];
  }
}

inline polydg::Tensor identity_tensor(int d) {
  polydg::Tensor t{};
  for (int i = 0; i < d; ++i) t[i][i] = 1.0;
  return t;
}

}  // namespace testing
