#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

namespace polydg {

/// Largest ambient dimension handled anywhere in the library (3D space + time).
inline constexpr int kMaxDim = 4;

/// Fixed-capacity point/vector; only the first `dim` components are meaningful.
using Vec = std::array<double, kMaxDim>;
using Tensor = std::array<Vec, kMaxDim>;

inline double dot(const Vec& a, const Vec& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a, int dim) { return std::sqrt(dot(a, a, dim)); }

inline Vec axpy(double alpha, const Vec& x, const Vec& y) {
  Vec r{};
  for (int i = 0; i < kMaxDim; ++i) r[i] = alpha * x[i] + y[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r{};
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r{};
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator*(double s, const Vec& a) {
  Vec r{};
  for (int i = 0; i < kMaxDim; ++i) r[i] = s * a[i];
  return r;
}

/// y = T x restricted to the leading dim x dim block.
inline Vec apply(const Tensor& t, const Vec& x, int dim) {
  Vec r{};
  for (int i = 0; i < dim; ++i) {
    double s = 0.0;
    for (int j = 0; j < dim; ++j) s += t[i][j] * x[j];
    r[i] = s;
  }
  return r;
}

/// Axis-aligned box [lo_1, hi_1] x ... x [lo_d, hi_d].
struct Box {
  int dim = 0;
  Vec lo{};
  Vec hi{};

  static Box empty(int dim);
  void expand(const Vec& p);
  bool contains(const Vec& p, double tol = 0.0) const;
  double volume() const;
};

/// Determinant of the leading n x n block, n <= 4.
double determinant(const Tensor& m, int n);

/// k-dimensional measure of the simplex spanned by k+1 vertices in R^dim.
/// Uses |det| when k == dim and the Gram determinant otherwise.
double simplex_measure(std::span<const Vec> vertices, int k, int dim);

/// Signed volume of a full-dimensional simplex (d+1 vertices in R^d).
double signed_simplex_volume(std::span<const Vec> vertices, int dim);

/// Integration cell: the affine image of the reference k-simplex, optionally
/// extruded by `extrusion` along the last ambient axis (a prism whose base
/// sits at the vertices' last coordinate).
struct Cell {
  std::array<Vec, 4> vertices{};
  int simplex_dim = 0;
  double extrusion = 0.0;

  bool is_prism() const { return extrusion > 0.0; }
  /// Dimension of the reference domain (k, or k+1 for a prism).
  int reference_dim() const { return simplex_dim + (is_prism() ? 1 : 0); }
  double measure(int dim) const;
  /// Maps reference coordinates (k simplex coordinates, then s in [0,1] for prisms).
  Vec map(std::span<const double> ref, int dim) const;
};

}  // namespace polydg
