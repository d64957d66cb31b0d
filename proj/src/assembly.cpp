#include "polydg/assembly.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "polydg/parallel.hpp"
#include "polydg/quadrature.hpp"

namespace polydg {

int kernel_order(int degree, int increment) { return std::min(2 * degree + increment, kMaxQuadratureOrder); }

void cell_quadrature(const Cell& cell, int dim, int order, MappedRule& out) {
  map_to_cell(cell_rule(cell.simplex_dim, cell.is_prism(), order), cell, dim, out);
}

namespace {

struct Scratch {
  MappedRule rule;
  std::vector<double> va, ga, vb, gb, fa, fb, ag, bg;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

void eval(const BasisSpec& basis, const Vec& x, std::vector<double>& vals, std::vector<double>& grads) {
  vals.resize(basis.size());
  grads.resize(basis.size() * static_cast<std::size_t>(basis.dim()));
  basis.evaluate(x, vals, grads);
}

// fluxes[i] = grad(phi_i) . v
void directional(const std::vector<double>& grads, const Vec& v, int d, std::size_t n, std::vector<double>& out) {
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += grads[i * d + k] * v[k];
    out[i] = s;
  }
}

}  // namespace

void element_kernel(const Discretization& disc, const PdeCoefficients& coeffs, int cell, int order,
                    LocalContribution& out) {
  const int d = disc.dim;
  const int e = disc.cell_element[cell];
  const BasisSpec& basis = disc.elements[e].basis;
  const int n = static_cast<int>(basis.size());
  Scratch& s = scratch();
  cell_quadrature(disc.cells[cell], d, order, s.rule);
  double* block = out.add_block(e, e, n, n);
  double* load = out.add_load(e, n);
  s.ag.resize(static_cast<std::size_t>(n) * d);
  s.bg.resize(static_cast<std::size_t>(n));
  for (std::size_t q = 0; q < s.rule.size(); ++q) {
    const Vec& x = s.rule.points[q];
    const double w = s.rule.weights[q];
    eval(basis, x, s.va, s.ga);
    const Tensor A = coeffs.A(x);
    const Vec b = coeffs.b(x);
    const double c = coeffs.c(x);
    const double f = coeffs.f(x);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < d; ++k) {
        double t = 0.0;
        for (int l = 0; l < d; ++l) t += A[k][l] * s.ga[j * d + l];
        s.ag[j * d + k] = t;
      }
      double t = c * s.va[j];
      for (int k = 0; k < d; ++k) t += b[k] * s.ga[j * d + k];
      s.bg[j] = t;
    }
    for (int r = 0; r < n; ++r) {
      const double vr = s.va[r];
      const double* gr = &s.ga[r * d];
      double* row = block + r * n;
      for (int j = 0; j < n; ++j) {
        double t = s.bg[j] * vr;
        for (int k = 0; k < d; ++k) t += s.ag[j * d + k] * gr[k];
        row[j] += w * t;
      }
      load[r] += w * f * vr;
    }
  }
}

void interior_face_kernel(const Discretization& disc, const PdeCoefficients& coeffs, int subface, double sigma,
                          Downwind downwind, int order, const KernelHooks& hooks, RowSide side,
                          LocalContribution& out) {
  const int d = disc.dim;
  const FaceData& face = disc.faces[disc.subface_face[subface]];
  const int ea = face.owner, eb = face.neighbor;
  const BasisSpec& basis_a = disc.elements[ea].basis;
  const BasisSpec& basis_b = disc.elements[eb].basis;
  const int na = static_cast<int>(basis_a.size()), nb = static_cast<int>(basis_b.size());
  const Vec& n = face.normal;
  const double cf = hooks.suppress_consistency ? 0.0 : 1.0;
  Scratch& s = scratch();
  cell_quadrature(disc.subfaces[subface], d, order, s.rule);

  double* aa = nullptr;
  double* ab = nullptr;
  double* ba = nullptr;
  double* bb = nullptr;
  const std::size_t first = out.blocks().size();
  if (side != RowSide::NeighborOnly) {
    out.add_block(ea, ea, na, na);
    out.add_block(ea, eb, na, nb);
  }
  if (side != RowSide::OwnerOnly) {
    out.add_block(eb, ea, nb, na);
    out.add_block(eb, eb, nb, nb);
  }
  std::size_t k = first;
  if (side != RowSide::NeighborOnly) {
    aa = out.block(k++);
    ab = out.block(k++);
  }
  if (side != RowSide::OwnerOnly) {
    ba = out.block(k++);
    bb = out.block(k++);
  }
  // term(R, C)[j][i]: test phi_j of R, trial phi_i of C; s = +1 on the owner, -1 on the neighbor.
  auto add_ip = [&](double* blk, double w, const std::vector<double>& vr, const std::vector<double>& fr, double sr,
                    int nr, const std::vector<double>& vc, const std::vector<double>& fc, double sc, int nc) {
    for (int j = 0; j < nr; ++j)
      for (int i = 0; i < nc; ++i)
        blk[j * nc + i] +=
            w * (-0.5 * cf * (fc[i] * sr * vr[j] + fr[j] * sc * vc[i]) + sigma * sc * sr * vc[i] * vr[j]);
  };
  auto add_upwind = [&](double* blk, double coef, const std::vector<double>& vr, int nr, const std::vector<double>& vc,
                        int nc) {
    for (int j = 0; j < nr; ++j)
      for (int i = 0; i < nc; ++i) blk[j * nc + i] += coef * vc[i] * vr[j];
  };

  for (std::size_t q = 0; q < s.rule.size(); ++q) {
    const Vec& x = s.rule.points[q];
    const double w = s.rule.weights[q];
    eval(basis_a, x, s.va, s.ga);
    eval(basis_b, x, s.vb, s.gb);
    const Vec An = apply(coeffs.A(x), n, d);
    directional(s.ga, An, d, static_cast<std::size_t>(na), s.fa);
    directional(s.gb, An, d, static_cast<std::size_t>(nb), s.fb);
    if (aa) {
      add_ip(aa, w, s.va, s.fa, 1.0, na, s.va, s.fa, 1.0, na);
      add_ip(ab, w, s.va, s.fa, 1.0, na, s.vb, s.fb, -1.0, nb);
    }
    if (bb) {
      add_ip(ba, w, s.vb, s.fb, -1.0, nb, s.va, s.fa, 1.0, na);
      add_ip(bb, w, s.vb, s.fb, -1.0, nb, s.vb, s.fb, -1.0, nb);
    }
    if (downwind == Downwind::None) continue;
    const double bn = dot(coeffs.b(x), n, d);
    if (downwind == Downwind::Owner && aa) {
      add_upwind(aa, -w * bn, s.va, na, s.va, na);
      add_upwind(ab, w * bn, s.va, na, s.vb, nb);
    } else if (downwind == Downwind::Neighbor && bb) {
      const double bnd = -bn;  // b . n from the neighbor's side
      add_upwind(bb, -w * bnd, s.vb, nb, s.vb, nb);
      add_upwind(ba, w * bnd, s.vb, nb, s.va, na);
    }
  }
}

void boundary_kernel(const Discretization& disc, const PdeCoefficients& coeffs, int subface, BoundaryTag tag,
                     double sigma, bool inflow, int order, const KernelHooks& hooks,
                     const BoundaryValue& boundary_value, LocalContribution& out) {
  const int d = disc.dim;
  const int fi = disc.subface_face[subface];
  const FaceData& face = disc.faces[fi];
  const int e = face.owner;
  const BasisSpec& basis = disc.elements[e].basis;
  const int n = static_cast<int>(basis.size());
  const Vec& normal = face.normal;
  const double cf = hooks.suppress_consistency ? 0.0 : 1.0;
  Scratch& s = scratch();
  cell_quadrature(disc.subfaces[subface], d, order, s.rule);

  const bool has_matrix = tag == BoundaryTag::Dirichlet || tag == BoundaryTag::Inflow;
  double* block = has_matrix ? out.add_block(e, e, n, n) : nullptr;
  double* load = out.add_load(e, n);
  auto g_D = [&](const Vec& x) { return boundary_value ? boundary_value(fi, x) : coeffs.g_D(x); };

  for (std::size_t q = 0; q < s.rule.size(); ++q) {
    const Vec& x = s.rule.points[q];
    const double w = s.rule.weights[q];
    if (tag == BoundaryTag::Neumann) {
      s.va.resize(static_cast<std::size_t>(n));
      basis.evaluate(x, s.va);
      const double gn = coeffs.g_N(x);
      for (int j = 0; j < n; ++j) load[j] += w * gn * s.va[j];
      continue;
    }
    eval(basis, x, s.va, s.ga);
    const double g = g_D(x);
    if (tag == BoundaryTag::Dirichlet) {
      const Vec An = apply(coeffs.A(x), normal, d);
      directional(s.ga, An, d, static_cast<std::size_t>(n), s.fa);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i)
          block[j * n + i] += w * (-cf * (s.fa[i] * s.va[j] + s.fa[j] * s.va[i]) + sigma * s.va[i] * s.va[j]);
        load[j] += w * g * (-cf * s.fa[j] + sigma * s.va[j]);
      }
    }
    if (tag == BoundaryTag::Inflow || (tag == BoundaryTag::Dirichlet && inflow)) {
      const double bn = dot(coeffs.b(x), normal, d);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) block[j * n + i] -= w * bn * s.va[i] * s.va[j];
        load[j] -= w * bn * g * s.va[j];
      }
    }
  }
}

double element_a_bar(const Discretization& disc, std::size_t element, const Vec& normal,
                     const std::function<Tensor(const Vec&)>& diffusion, int order) {
  const int d = disc.dim;
  const ElementData& ed = disc.elements[element];
  MappedRule rule;
  double a_bar = 0.0;
  for (int c = ed.cell_begin; c < ed.cell_end; ++c) {
    cell_quadrature(disc.cells[c], d, order, rule);
    for (const Vec& x : rule.points) a_bar = std::max(a_bar, dot(normal, apply(diffusion(x), normal, d), d));
  }
  return a_bar;
}

double face_sigma(const Discretization& disc, std::size_t face, const std::function<Tensor(const Vec&)>& diffusion,
                  const PenaltyConfig& penalty, int increment) {
  const FaceData& f = disc.faces[face];
  auto data = [&](int e, double sup) {
    PenaltyElementData k;
    k.volume = disc.elements[e].volume;
    k.degree = disc.degree(e);
    k.a_bar = element_a_bar(disc, e, f.normal, diffusion, kernel_order(k.degree, increment));
    k.sup_adjacent_volume = sup;
    k.coverable = penalty.is_coverable(e);
    return k;
  };
  const PenaltyElementData owner = data(f.owner, f.sup_owner);
  if (f.is_boundary()) return penalty_sigma(f.measure, owner, nullptr, penalty.c_sigma, disc.dim);
  const PenaltyElementData neighbor = data(f.neighbor, f.sup_neighbor);
  return penalty_sigma(f.measure, owner, &neighbor, penalty.c_sigma, disc.dim);
}

namespace {

int face_degree(const Discretization& disc, const FaceData& f) {
  return f.is_boundary() ? disc.degree(f.owner) : std::max(disc.degree(f.owner), disc.degree(f.neighbor));
}

FaceSamples flipped(FaceSamples s) {
  s.bn = -s.bn;
  std::swap(s.bn_min, s.bn_max);
  s.bn_min = -s.bn_min;
  s.bn_max = -s.bn_max;
  return s;
}

}  // namespace

FaceSetup prepare_faces(const Discretization& disc, const PdeCoefficients& coeffs, const AssemblyConfig& config,
                        bool structural_slab_faces) {
  const std::size_t nf = disc.faces.size();
  FaceSetup setup;
  setup.tags.assign(nf, BoundaryTag::Interior);
  setup.sigma.assign(nf, 0.0);
  setup.downwind.assign(nf, Downwind::None);
  auto diffusion = [&coeffs](const Vec& x) { return coeffs.A(x); };
  parallel_for(nf, config.workers, [&](std::size_t begin, std::size_t end, int) {
    MappedRule rule;
    std::vector<Vec> pts;
    std::vector<double> wts;
    for (std::size_t f = begin; f < end; ++f) {
      const FaceData& face = disc.faces[f];
      if (structural_slab_faces && face.kind != FaceKind::Standard) {
        setup.tags[f] = face.kind == FaceKind::SlabBottom ? BoundaryTag::Inflow : BoundaryTag::Outflow;
        continue;
      }
      const int order = kernel_order(face_degree(disc, face), config.quadrature_increment);
      pts.clear();
      wts.clear();
      for (int sf = face.sub_begin; sf < face.sub_end; ++sf) {
        cell_quadrature(disc.subfaces[sf], disc.dim, order, rule);
        pts.insert(pts.end(), rule.points.begin(), rule.points.end());
        wts.insert(wts.end(), rule.weights.begin(), rule.weights.end());
      }
      const FaceSamples samples = sample_face(coeffs, face.normal, pts, wts);
      if (face.is_boundary()) {
        const bool dirichlet = config.predicate ? config.predicate(face.barycenter, face.normal) : true;
        const BoundaryTag tag = classify_from_samples(samples, dirichlet);
        setup.tags[f] = tag;
        if (tag == BoundaryTag::Inflow) setup.downwind[f] = Downwind::Owner;
        if (tag == BoundaryTag::Dirichlet) {
          if (elemental_inflow_part(samples) == ElementSide::InflowForElement) setup.downwind[f] = Downwind::Owner;
          setup.sigma[f] = face_sigma(disc, f, diffusion, config.penalty, config.quadrature_increment);
        }
      } else {
        if (elemental_inflow_part(samples) == ElementSide::InflowForElement) {
          setup.downwind[f] = Downwind::Owner;
        } else if (elemental_inflow_part(flipped(samples)) == ElementSide::InflowForElement) {
          setup.downwind[f] = Downwind::Neighbor;
        }
        setup.sigma[f] = face_sigma(disc, f, diffusion, config.penalty, config.quadrature_increment);
      }
      if (config.hooks.sigma_override && (!face.is_boundary() || setup.tags[f] == BoundaryTag::Dirichlet))
        setup.sigma[f] = *config.hooks.sigma_override;
    }
  });
  return setup;
}

DgSource::DgSource(const Discretization& disc, const PdeCoefficients& coeffs, const AssemblyConfig& config,
                   const FaceSetup& setup, std::vector<int> owned)
    : disc_(disc), coeffs_(coeffs), config_(config), setup_(setup) {
  const std::size_t ne = disc.num_elements();
  owned_.assign(ne, owned.empty());
  for (int e : owned) owned_[e] = true;
  const int d = disc.dim;
  auto nbasis = [&](int p) { return static_cast<int>(num_basis(p, d, disc.family)); };

  // (kind, degree) -> items, in launch order.
  std::map<std::pair<int, int>, std::vector<int>> buckets;
  for (std::size_t c = 0; c < disc.cells.size(); ++c) {
    const int e = disc.cell_element[c];
    if (owned_[e]) buckets[{static_cast<int>(Kind::Element), disc.degree(e)}].push_back(static_cast<int>(c));
  }
  for (std::size_t sf = 0; sf < disc.subfaces.size(); ++sf) {
    const int fi = disc.subface_face[sf];
    const FaceData& f = disc.faces[fi];
    const int p = face_degree(disc, f);
    Kind kind;
    if (!f.is_boundary()) {
      const bool a = owned_[f.owner], b = owned_[f.neighbor];
      if (!a && !b) continue;
      kind = (a && b) ? Kind::Interior : Kind::InteriorCut;
    } else {
      if (!owned_[f.owner]) continue;
      switch (setup.tags[fi]) {
        case BoundaryTag::Dirichlet:
          kind = Kind::Dirichlet;
          break;
        case BoundaryTag::Inflow:
          kind = Kind::Inflow;
          break;
        case BoundaryTag::Neumann:
          kind = Kind::Neumann;
          break;
        default:
          continue;
      }
    }
    buckets[{static_cast<int>(kind), p}].push_back(static_cast<int>(sf));
  }
  static const char* names[] = {"element", "interior", "interior_cut", "dirichlet", "inflow", "neumann"};
  for (auto& [key, items] : buckets) {
    const Kind kind = static_cast<Kind>(key.first);
    const int n = nbasis(key.second);
    WorkGroup g;
    g.kernel = names[key.first];
    g.degree = key.second;
    g.items = std::move(items);
    switch (kind) {
      case Kind::Element:
      case Kind::Dirichlet:
      case Kind::Inflow:
        g.slots = n * n;
        g.load_slots = n;
        break;
      case Kind::Interior:
        g.slots = 4 * n * n;
        break;
      case Kind::InteriorCut:
        g.slots = 2 * n * n;
        break;
      case Kind::Neumann:
        g.load_slots = n;
        break;
    }
    groups_.push_back(std::move(g));
    kinds_.push_back(kind);
  }
}

void DgSource::compute(std::size_t group, std::size_t item, LocalContribution& out) const {
  const WorkGroup& g = groups_[group];
  const int id = g.items[item];
  const int order = kernel_order(g.degree, config_.quadrature_increment);
  switch (kinds_[group]) {
    case Kind::Element:
      element_kernel(disc_, coeffs_, id, order, out);
      return;
    case Kind::Interior:
    case Kind::InteriorCut: {
      const int fi = disc_.subface_face[id];
      const FaceData& f = disc_.faces[fi];
      RowSide side = RowSide::Both;
      if (kinds_[group] == Kind::InteriorCut) side = owned_[f.owner] ? RowSide::OwnerOnly : RowSide::NeighborOnly;
      interior_face_kernel(disc_, coeffs_, id, setup_.sigma[fi], setup_.downwind[fi], order, config_.hooks, side,
                           out);
      return;
    }
    case Kind::Dirichlet:
    case Kind::Inflow:
    case Kind::Neumann: {
      const int fi = disc_.subface_face[id];
      boundary_kernel(disc_, coeffs_, id, setup_.tags[fi], setup_.sigma[fi], setup_.downwind[fi] == Downwind::Owner,
                      order, config_.hooks, config_.boundary_value, out);
      return;
    }
  }
}

AssemblyResult assemble(const Discretization& disc, const PdeCoefficients& coeffs, const AssemblyConfig& config) {
  const FaceSetup setup = prepare_faces(disc, coeffs, config);
  const DgSource source(disc, coeffs, config, setup);
  return run_assembly(source, RowLayout::all(disc.offsets), block_adjacency(disc), config.engine());
}

AssemblyResult assemble_approach1(const Discretization& disc, const PdeCoefficients& coeffs, AssemblyConfig config) {
  config.approach = Approach::TripletSort;
  return assemble(disc, coeffs, config);
}

AssemblyResult assemble_approach2(const Discretization& disc, const PdeCoefficients& coeffs, AssemblyConfig config) {
  config.approach = Approach::Pattern;
  return assemble(disc, coeffs, config);
}

BlockPattern build_block_pattern(const Discretization& disc, int workers) {
  BlockPattern bp;
  bp.offsets = disc.offsets;
  const auto adj = block_adjacency(disc);
  for (std::size_t e = 0; e < adj.size(); ++e)
    for (int c : adj[e]) bp.blocks.push_back({static_cast<int>(e), c});
  bp.skeleton = build_pattern(RowLayout::all(disc.offsets), adj, workers);
  return bp;
}

}  // namespace polydg
