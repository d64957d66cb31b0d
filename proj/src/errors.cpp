#include "polydg/errors.hpp"

#include <algorithm>
#include <cmath>

#include "polydg/quadrature.hpp"

namespace polydg {

namespace {

double value_at(const Discretization& disc, std::span<const double> u, int e, const Vec& x,
                std::vector<double>& vals, std::vector<double>* grads, Vec* grad) {
  const BasisSpec& basis = disc.elements[e].basis;
  const std::size_t n = basis.size();
  const int d = disc.dim;
  vals.resize(n);
  if (grads) {
    grads->resize(n * d);
    basis.evaluate(x, vals, *grads);
  } else {
    basis.evaluate(x, vals);
  }
  const double* ue = u.data() + disc.offsets[e];
  double v = 0.0;
  Vec g{};
  for (std::size_t i = 0; i < n; ++i) {
    v += ue[i] * vals[i];
    if (grads)
      for (int k = 0; k < d; ++k) g[k] += ue[i] * (*grads)[i * d + k];
  }
  if (grad) *grad = g;
  return v;
}

double divergence(const PdeCoefficients& coeffs, const Vec& x, int d) {
  if (!coeffs.advection) return 0.0;
  double div = 0.0;
  for (int k = 0; k < d; ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    div += (coeffs.b(xp)[k] - coeffs.b(xm)[k]) / (2.0 * h);
  }
  return div;
}

}  // namespace

ErrorReport compute_errors(const Discretization& disc, const PdeCoefficients& coeffs, std::span<const double> u,
                           const AssemblyConfig& config, bool structural_slab_faces) {
  const int d = disc.dim;
  ErrorReport r;
  r.dofs = disc.num_dofs();
  auto exact = [&](const Vec& x) { return coeffs.exact ? coeffs.exact(x) : 0.0; };
  auto exact_grad = [&](const Vec& x) { return coeffs.exact_gradient ? coeffs.exact_gradient(x) : Vec{}; };

  std::vector<double> vals, grads, vals2;
  MappedRule rule;
  double l2 = 0.0, diff = 0.0, react = 0.0, jumps = 0.0;
  for (std::size_t c = 0; c < disc.cells.size(); ++c) {
    const int e = disc.cell_element[c];
    cell_quadrature(disc.cells[c], d, kernel_order(disc.degree(e), 4), rule);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec& x = rule.points[q];
      Vec gh;
      const double err = value_at(disc, u, e, x, vals, &grads, &gh) - exact(x);
      const Vec ge = gh - exact_grad(x);
      const double w = rule.weights[q];
      l2 += w * err * err;
      diff += w * dot(apply(coeffs.A(x), ge, d), ge, d);
      const double c0sq = std::max(coeffs.c(x) - 0.5 * divergence(coeffs, x, d), 0.0);
      react += w * c0sq * err * err;
    }
  }

  const FaceSetup setup = prepare_faces(disc, coeffs, config, structural_slab_faces);
  for (std::size_t sf = 0; sf < disc.subfaces.size(); ++sf) {
    const int fi = disc.subface_face[sf];
    const FaceData& f = disc.faces[fi];
    int p = disc.degree(f.owner);
    if (!f.is_boundary()) p = std::max(p, disc.degree(f.neighbor));
    cell_quadrature(disc.subfaces[sf], d, kernel_order(p, 4), rule);
    const bool penalised = !f.is_boundary() || setup.tags[fi] == BoundaryTag::Dirichlet;
    const double sigma = penalised ? setup.sigma[fi] : 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec& x = rule.points[q];
      const double own = value_at(disc, u, f.owner, x, vals, nullptr, nullptr);
      const double other = f.is_boundary() ? exact(x) : value_at(disc, u, f.neighbor, x, vals2, nullptr, nullptr);
      const double jump = own - other;
      const double bn = std::abs(dot(coeffs.b(x), f.normal, d));
      jumps += rule.weights[q] * (sigma + 0.5 * bn) * jump * jump;
    }
  }
  r.l2 = std::sqrt(l2);
  r.energy_diffusion = std::sqrt(diff);
  r.energy = std::sqrt(diff + react + jumps);
  return r;
}

double mesh_size(const PolytopicMesh& mesh) {
  double h = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) h = std::max(h, mesh.element_diameter(e));
  return h;
}

ErrorReport combine_reports(std::span<const ErrorReport> reports) {
  ErrorReport out;
  double l2 = 0.0, en = 0.0, ed = 0.0;
  for (const ErrorReport& r : reports) {
    l2 += r.l2 * r.l2;
    en += r.energy * r.energy;
    ed += r.energy_diffusion * r.energy_diffusion;
    out.dofs += r.dofs;
    out.h_max = std::max(out.h_max, r.h_max);
    out.timings.insert(out.timings.end(), r.timings.begin(), r.timings.end());
  }
  out.l2 = std::sqrt(l2);
  out.energy = std::sqrt(en);
  out.energy_diffusion = std::sqrt(ed);
  return out;
}

}  // namespace polydg
