#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polydg/geometry.hpp"

namespace polydg {

/// Highest exactness order accepted by simplex_rule / interval_rule.
inline constexpr int kMaxQuadratureOrder = 60;

enum class QuadratureDomain { Simplex, Interval, Prism };

/// Points and weights on a reference domain. Simplex rules live on the unit
/// simplex {x_i >= 0, sum x_i <= 1}; interval rules on [0,1]; prism rules on
/// (unit simplex) x [0,1] with the interval coordinate last.
struct QuadratureRule {
  QuadratureDomain domain = QuadratureDomain::Simplex;
  int dim = 0;    // reference coordinates per point
  int order = 0;  // exactness degree
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// Gauss-Jacobi nodes/weights on [0,1] for the weight (1-x)^alpha, m points.
void gauss_jacobi_unit(int m, int alpha, std::vector<double>& nodes, std::vector<double>& weights);

/// Conical-product (collapsed Gauss-Jacobi) rule exact to total degree `order`
/// on the unit d-simplex, d in {1,2,3}.
QuadratureRule simplex_rule(int d, int order);

/// Gauss-Legendre on [0,1] with ceil((order+1)/2) points.
QuadratureRule interval_rule(int order);

/// Tensor product of a simplex rule and an interval rule.
QuadratureRule prism_rule(const QuadratureRule& spatial, const QuadratureRule& interval);

/// Memoized rule for a cell shape: simplex of dimension k, or (k-simplex) x interval
/// when `prism` is set, both components exact to `order`. Thread-safe; the
/// returned reference stays valid for the lifetime of the program.
const QuadratureRule& cell_rule(int simplex_dim, bool prism, int order);

/// Rule pushed forward to physical coordinates.
struct MappedRule {
  std::vector<Vec> points;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

/// Affine push-forward to a physical k-simplex given by k+1 vertices in R^dim.
/// Throws std::invalid_argument for a degenerate simplex.
MappedRule map_to_simplex(const QuadratureRule& rule, std::span<const Vec> vertices, int dim);

/// Push-forward to an integration cell; `out` is overwritten.
void map_to_cell(const QuadratureRule& rule, const Cell& cell, int dim, MappedRule& out);

}  // namespace polydg
