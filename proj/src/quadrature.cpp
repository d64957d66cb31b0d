#include "polydg/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace polydg {

namespace {

// Jacobi polynomial P_n^{(alpha,beta)}(x) on [-1,1] by the three-term recurrence.
double jacobi(int n, double alpha, double beta, double x) {
  if (n == 0) return 1.0;
  double p_prev = 1.0;
  double p = 0.5 * (alpha - beta + (alpha + beta + 2.0) * x);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + alpha + beta;
    const double a1 = 2.0 * (k + 1) * (k + alpha + beta + 1.0) * s;
    const double a2 = (s + 1.0) * (alpha * alpha - beta * beta);
    const double a3 = s * (s + 1.0) * (s + 2.0);
    const double a4 = 2.0 * (k + alpha) * (k + beta) * (s + 2.0);
    const double next = (std::fma(a3, x, a2) * p - a4 * p_prev) / a1;
    p_prev = p;
    p = next;
  }
  return p;
}

double jacobi_derivative(int n, double alpha, double beta, double x) {
  if (n == 0) return 0.0;
  return 0.5 * (n + alpha + beta + 1.0) * jacobi(n - 1, alpha + 1.0, beta + 1.0, x);
}

void check_order(int order) {
  if (order < 0 || order > kMaxQuadratureOrder)
    throw std::invalid_argument("quadrature order " + std::to_string(order) + " outside [0, " +
                                std::to_string(kMaxQuadratureOrder) + "]");
}

int points_for_order(int order) { return order / 2 + 1; }

}  // namespace

void gauss_jacobi_unit(int m, int alpha, std::vector<double>& nodes, std::vector<double>& weights) {
  if (m < 1) throw std::invalid_argument("gauss_jacobi_unit: need at least one point");
  const double a = alpha;
  std::vector<double> roots(static_cast<std::size_t>(m));
  // Newton iteration with deflation against the roots already found.
  for (int k = 0; k < m; ++k) {
    double r = -std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * m));
    if (k > 0) r = 0.5 * (r + roots[k - 1]);
    for (int it = 0; it < 100; ++it) {
      double deflate = 0.0;
      for (int j = 0; j < k; ++j) deflate += 1.0 / (r - roots[j]);
      const double p = jacobi(m, a, 0.0, r);
      const double dp = jacobi_derivative(m, a, 0.0, r);
      const double delta = -p / (dp - deflate * p);
      r += delta;
      if (std::abs(delta) < 1e-17) break;
    }
    roots[k] = r;
  }
  nodes.resize(static_cast<std::size_t>(m));
  weights.resize(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double x = roots[k];
    const double dp = jacobi_derivative(m, a, 0.0, x);
    nodes[k] = 0.5 * (1.0 + x);
    // Weight for (1-xi)^alpha on [0,1]; the 2^(alpha+1) factors cancel.
    weights[k] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule simplex_rule(int d, int order) {
  check_order(order);
  if (d < 1 || d > 3) throw std::invalid_argument("simplex_rule: dimension must be 1, 2 or 3");
  const int m = points_for_order(order);
  QuadratureRule rule;
  rule.domain = QuadratureDomain::Simplex;
  rule.dim = d;
  rule.order = order;

  std::vector<double> x0, w0, x1, w1, x2, w2;
  gauss_jacobi_unit(m, d - 1, x0, w0);
  if (d == 1) {
    rule.points = x0;
    rule.weights = w0;
    return rule;
  }
  gauss_jacobi_unit(m, d - 2, x1, w1);
  if (d == 2) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        rule.points.push_back(x0[i]);
        rule.points.push_back(x1[j] * (1.0 - x0[i]));
        rule.weights.push_back(w0[i] * w1[j]);
      }
    return rule;
  }
  gauss_jacobi_unit(m, 0, x2, w2);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const double s = (1.0 - x0[i]) * (1.0 - x1[j]);
        rule.points.push_back(x0[i]);
        rule.points.push_back(x1[j] * (1.0 - x0[i]));
        rule.points.push_back(x2[k] * s);
        rule.weights.push_back(w0[i] * w1[j] * w2[k]);
      }
  return rule;
}

QuadratureRule interval_rule(int order) {
  check_order(order);
  QuadratureRule rule;
  rule.domain = QuadratureDomain::Interval;
  rule.dim = 1;
  rule.order = order;
  gauss_jacobi_unit(points_for_order(order), 0, rule.points, rule.weights);
  return rule;
}

QuadratureRule prism_rule(const QuadratureRule& spatial, const QuadratureRule& interval) {
  if (spatial.domain != QuadratureDomain::Simplex || interval.domain != QuadratureDomain::Interval)
    throw std::invalid_argument("prism_rule: expects a simplex rule and an interval rule");
  QuadratureRule rule;
  rule.domain = QuadratureDomain::Prism;
  rule.dim = spatial.dim + 1;
  rule.order = std::min(spatial.order, interval.order);
  for (std::size_t i = 0; i < spatial.size(); ++i)
    for (std::size_t j = 0; j < interval.size(); ++j) {
      const auto p = spatial.point(i);
      rule.points.insert(rule.points.end(), p.begin(), p.end());
      rule.points.push_back(interval.points[j]);
      rule.weights.push_back(spatial.weights[i] * interval.weights[j]);
    }
  return rule;
}

namespace {

QuadratureRule point_rule() {
  QuadratureRule rule;
  rule.domain = QuadratureDomain::Simplex;
  rule.dim = 0;
  rule.order = kMaxQuadratureOrder;
  rule.weights = {1.0};
  return rule;
}

}  // namespace

const QuadratureRule& cell_rule(int simplex_dim, bool prism, int order) {
  static std::mutex mutex;
  static std::map<std::tuple<int, bool, int>, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{simplex_dim, prism, order}];
  if (!slot) {
    QuadratureRule base = simplex_dim == 0 ? point_rule() : simplex_rule(simplex_dim, order);
    if (prism) {
      if (simplex_dim == 0) {
        base = interval_rule(order);
      } else {
        base = prism_rule(base, interval_rule(order));
      }
    }
    slot = std::make_unique<QuadratureRule>(std::move(base));
  }
  return *slot;
}

MappedRule map_to_simplex(const QuadratureRule& rule, std::span<const Vec> vertices, int dim) {
  const int k = rule.dim;
  if (static_cast<int>(vertices.size()) != k + 1)
    throw std::invalid_argument("map_to_simplex: vertex count does not match rule dimension");
  double scale = 0.0;
  for (int j = 1; j <= k; ++j) scale = std::max(scale, norm(vertices[j] - vertices[0], dim));
  const double measure = simplex_measure(vertices, k, dim);
  if (measure < 1e-14 * std::pow(scale, k) || measure == 0.0)
    throw std::invalid_argument("map_to_simplex: degenerate simplex");
  Cell cell;
  for (int j = 0; j <= k; ++j) cell.vertices[j] = vertices[j];
  cell.simplex_dim = k;
  MappedRule out;
  map_to_cell(rule, cell, dim, out);
  return out;
}

void map_to_cell(const QuadratureRule& rule, const Cell& cell, int dim, MappedRule& out) {
  double ref_measure = 1.0;
  for (int i = 2; i <= cell.simplex_dim; ++i) ref_measure *= i;
  // Physical measure over reference measure (the reference simplex has 1/k!).
  const double jac = cell.measure(dim) * ref_measure;
  out.points.resize(rule.size());
  out.weights.resize(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    out.points[q] = cell.map(rule.point(q), dim);
    out.weights[q] = rule.weights[q] * jac;
  }
}

}  // namespace polydg
