#include "polydg/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polydg {

bool diffusion_is_psd(const Tensor& a, int dim) {
  double norm_inf = 0.0;
  for (int i = 0; i < dim; ++i) {
    double row = 0.0;
    for (int j = 0; j < dim; ++j) row += std::abs(a[i][j]);
    norm_inf = std::max(norm_inf, row);
  }
  const double tol = 1e-12 * norm_inf;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (std::abs(a[i][j] - a[j][i]) > tol) return false;
  for (int i = 0; i < dim; ++i) {
    if (a[i][i] < -tol) return false;
    for (int j = i + 1; j < dim; ++j) {
      // xi = e_i +/- e_j, |xi|^2 = 2
      if (a[i][i] + a[j][j] + 2.0 * a[i][j] < -2.0 * tol) return false;
      if (a[i][i] + a[j][j] - 2.0 * a[i][j] < -2.0 * tol) return false;
    }
  }
  return true;
}

PdeCoefficients block_coefficients(const SpaceTimeCoefficients& st) {
  const int s = st.spatial_dim;
  PdeCoefficients out;
  out.dim = s + 1;
  out.diffusion = [st, s](const Vec& xt) {
    const Tensor a = st.a(xt);
    Tensor full{};
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) full[i][j] = a[i][j];
    return full;
  };
  out.advection = [st, s](const Vec& xt) {
    Vec b = st.w(xt);
    b[s] = 1.0;
    return b;
  };
  out.reaction = [st](const Vec& xt) { return st.c(xt); };
  out.source = [st](const Vec& xt) { return st.f(xt); };
  out.dirichlet = [st](const Vec& xt) { return st.g_D(xt); };
  out.neumann = [st](const Vec& xt) { return st.g_N(xt); };
  out.exact = st.exact;
  out.exact_gradient = st.exact_gradient;
  return out;
}

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Interior:
      return "interior";
    case BoundaryTag::Dirichlet:
      return "dirichlet";
    case BoundaryTag::Neumann:
      return "neumann";
    case BoundaryTag::Inflow:
      return "inflow";
    case BoundaryTag::Outflow:
      return "outflow";
  }
  return "?";
}

FaceSamples sample_face(const PdeCoefficients& coeffs, const Vec& normal, std::span<const Vec> points,
                        std::span<const double> weights) {
  const int d = coeffs.dim;
  Vec bary{};
  double total = 0.0;
  FaceSamples s;
  s.bn_min = std::numeric_limits<double>::infinity();
  s.bn_max = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < points.size(); ++q) {
    bary = axpy(weights[q], points[q], bary);
    total += weights[q];
    const Vec b = coeffs.b(points[q]);
    const double bn = dot(b, normal, d);
    s.bn_min = std::min(s.bn_min, bn);
    s.bn_max = std::max(s.bn_max, bn);
    s.b_scale = std::max(s.b_scale, norm(b, d));
  }
  bary = (1.0 / total) * bary;
  const Tensor a = coeffs.A(bary);
  s.nAn = dot(normal, apply(a, normal, d), d);
  for (int i = 0; i < d; ++i) {
    double row = 0.0;
    for (int j = 0; j < d; ++j) row += std::abs(a[i][j]);
    s.a_norm = std::max(s.a_norm, row);
  }
  const Vec b = coeffs.b(bary);
  s.bn = dot(b, normal, d);
  s.b_scale = std::max(s.b_scale, norm(b, d));
  return s;
}

namespace {

double advection_tolerance(const FaceSamples& s) { return 1e-12 * std::max(1.0, s.b_scale); }

void check_straddle(const FaceSamples& s) {
  const double tol = advection_tolerance(s);
  if (s.bn_min < -tol && s.bn_max > tol)
    throw ClassificationError("b.n changes sign across a face (min " + std::to_string(s.bn_min) + ", max " +
                              std::to_string(s.bn_max) + "); refine the mesh so faces separate inflow and outflow");
}

}  // namespace

BoundaryTag classify_from_samples(const FaceSamples& s, bool dirichlet) {
  const double tau = 1e-12 * std::max(1.0, s.a_norm);
  if (s.nAn > tau) {
    if (!dirichlet) return BoundaryTag::Neumann;
    check_straddle(s);
    return BoundaryTag::Dirichlet;
  }
  check_straddle(s);
  return s.bn < -advection_tolerance(s) ? BoundaryTag::Inflow : BoundaryTag::Outflow;
}

BoundaryTag classify_boundary_face(const PdeCoefficients& coeffs, const Vec& normal, std::span<const Vec> points,
                                   std::span<const double> weights, const DirichletPredicate& predicate) {
  const FaceSamples s = sample_face(coeffs, normal, points, weights);
  bool dirichlet = true;
  if (predicate) {
    Vec bary{};
    double total = 0.0;
    for (std::size_t q = 0; q < points.size(); ++q) {
      bary = axpy(weights[q], points[q], bary);
      total += weights[q];
    }
    dirichlet = predicate((1.0 / total) * bary, normal);
  }
  return classify_from_samples(s, dirichlet);
}

ElementSide elemental_inflow_part(const FaceSamples& s) {
  check_straddle(s);
  return s.bn < -advection_tolerance(s) ? ElementSide::InflowForElement : ElementSide::OutflowForElement;
}

ElementSide elemental_inflow_part(const PdeCoefficients& coeffs, const Vec& normal, std::span<const Vec> points,
                                  std::span<const double> weights) {
  return elemental_inflow_part(sample_face(coeffs, normal, points, weights));
}

namespace {

double penalty_term(double face_measure, const PenaltyElementData& k, int dim) {
  if (!(k.sup_adjacent_volume > 0.0))
    throw std::invalid_argument("penalty_sigma: no subdivision simplex adjacent to the face");
  const double p2 = static_cast<double>(k.degree) * k.degree;
  const double c_cov = k.coverable ? std::pow(static_cast<double>(k.degree), 2.0 * (dim - 1))
                                   : std::numeric_limits<double>::infinity();
  const double ratio = std::min(k.volume / k.sup_adjacent_volume, c_cov);
  return ratio * k.a_bar * p2 * face_measure / k.volume;
}

}  // namespace

double penalty_sigma(double face_measure, const PenaltyElementData& owner, const PenaltyElementData* neighbor,
                     double c_sigma, int dim) {
  double m = penalty_term(face_measure, owner, dim);
  if (neighbor) m = std::max(m, penalty_term(face_measure, *neighbor, dim));
  return c_sigma * m;
}

}  // namespace polydg
