#include "polydg/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace polydg {

namespace {

void jitter_vertices(std::vector<Vec>& vertices, int dim, double amount, double h, std::uint64_t seed) {
  if (amount <= 0.0) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amount * h, amount * h);
  for (Vec& v : vertices) {
    bool interior = true;
    for (int i = 0; i < dim; ++i) interior &= v[i] > 0.5 * h && v[i] < 1.0 - 0.5 * h;
    // Draws happen for every vertex so the perturbation of a vertex does
    // not depend on which other vertices are interior.
    Vec d{};
    for (int i = 0; i < dim; ++i) d[i] = u(rng);
    if (interior)
      for (int i = 0; i < dim; ++i) v[i] += d[i];
  }
}

}  // namespace

SimplicialMesh unit_square_mesh(int n, double jitter, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("unit_square_mesh: n must be positive");
  const double h = 1.0 / n;
  std::vector<Vec> vertices;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) vertices.push_back({i * h, j * h, 0.0, 0.0});
  jitter_vertices(vertices, 2, jitter, h, seed);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 4>> tris;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), 0});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), 0});
    }
  return make_simplicial_mesh(2, std::move(vertices), std::move(tris));
}

SimplicialMesh unit_cube_mesh(int n, double jitter, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("unit_cube_mesh: n must be positive");
  const double h = 1.0 / n;
  std::vector<Vec> vertices;
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) vertices.push_back({i * h, j * h, k * h, 0.0});
  jitter_vertices(vertices, 3, jitter, h, seed);
  auto id = [n](std::array<int, 3> c) { return (c[2] * (n + 1) + c[1]) * (n + 1) + c[0]; };
  std::array<int, 3> perm{0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<std::array<int, 4>> tets;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> t{};
          t[0] = id(c);
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            t[s + 1] = id(c);
          }
          tets.push_back(t);
        }
  return make_simplicial_mesh(3, std::move(vertices), std::move(tets));
}

std::vector<int> block_agglomeration(const SimplicialMesh& mesh, int blocks_per_side) {
  if (blocks_per_side < 1) throw std::invalid_argument("block_agglomeration: blocks_per_side must be positive");
  Box box = Box::empty(mesh.dim);
  for (const Vec& v : mesh.vertices) box.expand(v);
  std::vector<int> map(mesh.num_simplices());
  for (std::size_t s = 0; s < mesh.num_simplices(); ++s) {
    const auto vs = mesh.simplex_vertices(s);
    int index = 0;
    for (int i = mesh.dim - 1; i >= 0; --i) {
      double c = 0.0;
      for (int k = 0; k <= mesh.dim; ++k) c += vs[k][i];
      c /= mesh.dim + 1;
      const int b = std::clamp(static_cast<int>((c - box.lo[i]) / (box.hi[i] - box.lo[i]) * blocks_per_side), 0,
                               blocks_per_side - 1);
      index = index * blocks_per_side + b;
    }
    map[s] = index;
  }
  return map;
}

std::vector<int> seeded_agglomeration(const SimplicialMesh& mesh, int n_elements, std::uint64_t seed) {
  const std::size_t ns = mesh.num_simplices();
  if (n_elements < 1 || static_cast<std::size_t>(n_elements) > ns)
    throw std::invalid_argument("seeded_agglomeration: element count must lie in [1, #simplices]");
  const int d = mesh.dim;
  std::map<std::array<int, 3>, std::vector<int>> facets;
  for (std::size_t s = 0; s < ns; ++s)
    for (int skip = 0; skip <= d; ++skip) {
      std::array<int, 3> key{-1, -1, -1};
      int m = 0;
      for (int k = 0; k <= d; ++k)
        if (k != skip) key[m++] = mesh.simplices[s][k];
      std::sort(key.begin(), key.begin() + d);
      facets[key].push_back(static_cast<int>(s));
    }
  std::vector<std::vector<int>> adj(ns);
  for (const auto& [key, owners] : facets)
    if (owners.size() == 2) {
      adj[owners[0]].push_back(owners[1]);
      adj[owners[1]].push_back(owners[0]);
    }

  std::vector<int> order(ns);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> map(ns, -1);
  std::vector<std::vector<int>> fronts(n_elements);
  for (int e = 0; e < n_elements; ++e) {
    map[order[e]] = e;
    fronts[e] = {order[e]};
  }
  for (bool grew = true; grew;) {
    grew = false;
    for (int e = 0; e < n_elements; ++e) {
      std::vector<int> next;
      for (int s : fronts[e])
        for (int t : adj[s])
          if (map[t] < 0) {
            map[t] = e;
            next.push_back(t);
          }
      grew |= !next.empty();
      fronts[e] = std::move(next);
    }
  }
  if (std::find(map.begin(), map.end(), -1) != map.end())
    throw std::invalid_argument("seeded_agglomeration: mesh is not facet-connected");
  return map;
}

}  // namespace polydg
