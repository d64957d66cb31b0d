#include "polydg/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace polydg {

Box Box::empty(int dim) {
  Box b;
  b.dim = dim;
  b.lo.fill(std::numeric_limits<double>::infinity());
  b.hi.fill(-std::numeric_limits<double>::infinity());
  for (int i = dim; i < kMaxDim; ++i) b.lo[i] = b.hi[i] = 0.0;
  return b;
}

void Box::expand(const Vec& p) {
  for (int i = 0; i < dim; ++i) {
    lo[i] = std::min(lo[i], p[i]);
    hi[i] = std::max(hi[i], p[i]);
  }
}

bool Box::contains(const Vec& p, double tol) const {
  for (int i = 0; i < dim; ++i)
    if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= hi[i] - lo[i];
  return v;
}

double determinant(const Tensor& m, int n) {
  switch (n) {
    case 0:
      return 1.0;
    case 1:
      return m[0][0];
    case 2:
      return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    case 3:
      return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
             m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
             m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    case 4: {
      double det = 0.0;
      for (int c = 0; c < 4; ++c) {
        Tensor minor{};
        for (int i = 1; i < 4; ++i) {
          int cc = 0;
          for (int j = 0; j < 4; ++j) {
            if (j == c) continue;
            minor[i - 1][cc++] = m[i][j];
          }
        }
        const double sign = (c % 2 == 0) ? 1.0 : -1.0;
        det += sign * m[0][c] * determinant(minor, 3);
      }
      return det;
    }
    default:
      throw std::invalid_argument("determinant: dimension above 4");
  }
}

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

double signed_simplex_volume(std::span<const Vec> vertices, int dim) {
  Tensor jac{};
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) jac[i][j] = vertices[j + 1][i] - vertices[0][i];
  return determinant(jac, dim) / factorial(dim);
}

double simplex_measure(std::span<const Vec> vertices, int k, int dim) {
  if (k == 0) return 1.0;
  if (k == dim) return std::abs(signed_simplex_volume(vertices, dim));
  // Gram determinant of the edge vectors.
  Tensor gram{};
  for (int a = 0; a < k; ++a) {
    const Vec ea = vertices[a + 1] - vertices[0];
    for (int b = a; b < k; ++b) {
      const Vec eb = vertices[b + 1] - vertices[0];
      gram[a][b] = gram[b][a] = dot(ea, eb, dim);
    }
  }
  return std::sqrt(std::max(0.0, determinant(gram, k))) / factorial(k);
}

double Cell::measure(int dim) const {
  // A prism's base lives in the hyperplane orthogonal to the last axis.
  const int base_dim = is_prism() ? dim - 1 : dim;
  const double base = simplex_measure(std::span(vertices.data(), simplex_dim + 1), simplex_dim, base_dim);
  return is_prism() ? base * extrusion : base;
}

Vec Cell::map(std::span<const double> ref, int dim) const {
  Vec x = vertices[0];
  for (int j = 0; j < simplex_dim; ++j) {
    const double l = ref[j];
    for (int i = 0; i < dim; ++i) x[i] = std::fma(l, vertices[j + 1][i] - vertices[0][i], x[i]);
  }
  if (is_prism()) x[dim - 1] += ref[simplex_dim] * extrusion;
  return x;
}

}  // namespace polydg
