#include "polydg/spacetime.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

namespace polydg {

TimePartition TimePartition::uniform(double t_end, int steps) {
  if (steps < 1 || !(t_end > 0.0)) throw std::invalid_argument("uniform time partition needs steps >= 1 and T > 0");
  TimePartition tp;
  tp.nodes.resize(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) tp.nodes[i] = t_end * i / steps;
  tp.nodes.back() = t_end;
  return tp;
}

void TimePartition::validate() const {
  if (nodes.size() < 2 || nodes.front() != 0.0) throw std::invalid_argument("time partition must start at 0");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw std::invalid_argument("time partition must be strictly increasing");
}

int SlabMesh::bottom_face(std::size_t element) const {
  return static_cast<int>(spatial->faces.size() + element);
}

int SlabMesh::top_face(std::size_t element) const {
  return static_cast<int>(spatial->faces.size() + spatial->num_elements() + element);
}

SlabMesh build_slab(const PolytopicMesh& spatial, double t0, double t1, std::span<const int> degrees, Family family) {
  if (!(t1 > t0)) throw std::invalid_argument("build_slab: empty time interval");
  const int s = spatial.dim();
  const int d = s + 1;
  const double tau = t1 - t0;
  const int zero = 0;
  const Discretization base = discretize(spatial, std::span(&zero, 1));
  const auto deg = expand_degrees(degrees, spatial.num_elements());

  SlabMesh slab;
  slab.spatial = &spatial;
  slab.t0 = t0;
  slab.t1 = t1;
  Discretization& disc = slab.disc;
  disc.dim = d;
  disc.family = family;
  disc.elements.resize(base.num_elements());
  auto lift = [&](const Vec& x, double t) {
    Vec y = x;
    y[s] = t;
    return y;
  };

  for (std::size_t e = 0; e < base.num_elements(); ++e) {
    const ElementData& be = base.elements[e];
    Box box = be.basis.box();
    box.dim = d;
    box.lo[s] = t0;
    box.hi[s] = t1;
    ElementData& ed = disc.elements[e];
    ed.basis = BasisSpec(box, deg[e], family);
    ed.volume = be.volume * tau;
    ed.cell_begin = static_cast<int>(disc.cells.size());
    for (int c = be.cell_begin; c < be.cell_end; ++c) {
      Cell cell = base.cells[c];
      for (int i = 0; i <= s; ++i) cell.vertices[i] = lift(cell.vertices[i], t0);
      cell.extrusion = tau;
      disc.cells.push_back(cell);
      disc.cell_element.push_back(static_cast<int>(e));
    }
    ed.cell_end = static_cast<int>(disc.cells.size());
  }

  // Lateral faces, index-aligned with the spatial faces.
  for (std::size_t f = 0; f < base.faces.size(); ++f) {
    const FaceData& bf = base.faces[f];
    FaceData fd = bf;
    fd.normal[s] = 0.0;
    fd.barycenter = lift(bf.barycenter, 0.5 * (t0 + t1));
    fd.measure = bf.measure * tau;
    fd.sup_owner = bf.sup_owner * tau;
    fd.sup_neighbor = bf.sup_neighbor * tau;
    fd.sub_begin = static_cast<int>(disc.subfaces.size());
    for (int sf = bf.sub_begin; sf < bf.sub_end; ++sf) {
      Cell cell = base.subfaces[sf];
      for (int i = 0; i < s; ++i) cell.vertices[i] = lift(cell.vertices[i], t0);
      cell.extrusion = tau;
      disc.subfaces.push_back(cell);
      disc.subface_face.push_back(static_cast<int>(f));
    }
    fd.sub_end = static_cast<int>(disc.subfaces.size());
    disc.faces.push_back(fd);
  }

  // Bottom then top facets: one face per element made of its simplices.
  for (const bool top : {false, true}) {
    const double t = top ? t1 : t0;
    for (std::size_t e = 0; e < base.num_elements(); ++e) {
      const ElementData& be = base.elements[e];
      FaceData fd;
      fd.normal[s] = top ? 1.0 : -1.0;
      fd.owner = static_cast<int>(e);
      fd.kind = top ? FaceKind::SlabTop : FaceKind::SlabBottom;
      fd.measure = be.volume;
      fd.sub_begin = static_cast<int>(disc.subfaces.size());
      Vec centroid{};
      for (int c = be.cell_begin; c < be.cell_end; ++c) {
        Cell cell = base.cells[c];
        Vec mid{};
        for (int i = 0; i <= s; ++i) {
          cell.vertices[i] = lift(cell.vertices[i], t);
          mid = axpy(1.0 / (s + 1), cell.vertices[i], mid);
        }
        const double m = cell.measure(d);
        centroid = axpy(m, mid, centroid);
        fd.sup_owner = std::max(fd.sup_owner, m * tau);
        disc.subfaces.push_back(cell);
        disc.subface_face.push_back(static_cast<int>(disc.faces.size()));
      }
      fd.barycenter = (1.0 / be.volume) * centroid;
      fd.sub_end = static_cast<int>(disc.subfaces.size());
      disc.faces.push_back(fd);
    }
  }
  disc.interfaces = base.interfaces;
  disc.interface_faces = base.interface_faces;
  finalize_offsets(disc);
  return slab;
}

double evaluate_solution(const Discretization& disc, std::span<const double> u, int element, const Vec& x) {
  const BasisSpec& basis = disc.elements[element].basis;
  thread_local std::vector<double> vals;
  vals.resize(basis.size());
  basis.evaluate(x, vals);
  const std::int64_t off = disc.offsets[element];
  double v = 0.0;
  for (std::size_t j = 0; j < vals.size(); ++j) v += u[off + static_cast<std::int64_t>(j)] * vals[j];
  return v;
}

double previous_value(const PreviousSlab& prev, const SpaceTimeCoefficients& st, int element, const Vec& xt) {
  if (prev.disc) return evaluate_solution(*prev.disc, prev.coeffs, element, xt);
  Vec x = xt;
  x[st.spatial_dim] = 0.0;
  return st.u0(x);
}

namespace {

void check_previous(const SlabMesh& slab, const PreviousSlab& prev) {
  if (!prev.disc) return;
  if (prev.disc->num_elements() != slab.disc.num_elements() ||
      static_cast<std::int64_t>(prev.coeffs.size()) != prev.disc->num_dofs())
    throw std::invalid_argument("previous slab solution does not match the slab discretization");
}

// Slab-structured kernels. Lateral faces reuse the face kernels on the block
// coefficients (only A n and b . n enter there, and n has no time part);
// volumes split off the time derivative, and bottom facets carry the jump.
class SlabSource : public ContributionSource {
 public:
  enum class Kind { Element, Interior, Dirichlet, Inflow, Neumann, TimeJump };

  SlabSource(const SlabMesh& slab, const SpaceTimeCoefficients& st, const PdeCoefficients& block,
             const AssemblyConfig& config, const FaceSetup& setup, const PreviousSlab& prev)
      : slab_(slab), st_(st), block_(block), config_(config), setup_(setup), prev_(prev) {
    const Discretization& disc = slab.disc;
    std::map<std::pair<int, int>, std::vector<int>> buckets;
    for (std::size_t c = 0; c < disc.cells.size(); ++c)
      buckets[{0, disc.degree(disc.cell_element[c])}].push_back(static_cast<int>(c));
    for (std::size_t sf = 0; sf < disc.subfaces.size(); ++sf) {
      const int fi = disc.subface_face[sf];
      const FaceData& f = disc.faces[fi];
      int kind = -1, p = disc.degree(f.owner);
      if (f.kind == FaceKind::SlabBottom) {
        kind = static_cast<int>(Kind::TimeJump);
      } else if (f.kind == FaceKind::Standard && !f.is_boundary()) {
        kind = static_cast<int>(Kind::Interior);
        p = std::max(p, disc.degree(f.neighbor));
      } else if (f.kind == FaceKind::Standard) {
        switch (setup.tags[fi]) {
          case BoundaryTag::Dirichlet:
            kind = static_cast<int>(Kind::Dirichlet);
            break;
          case BoundaryTag::Inflow:
            kind = static_cast<int>(Kind::Inflow);
            break;
          case BoundaryTag::Neumann:
            kind = static_cast<int>(Kind::Neumann);
            break;
          default:
            break;
        }
      }
      if (kind >= 0) buckets[{kind, p}].push_back(static_cast<int>(sf));
    }
    static const char* names[] = {"element", "interior", "dirichlet", "inflow", "neumann", "time_jump"};
    for (auto& [key, items] : buckets) {
      const Kind kind = static_cast<Kind>(key.first);
      const int n = static_cast<int>(num_basis(key.second, disc.dim, disc.family));
      WorkGroup g;
      g.kernel = names[key.first];
      g.degree = key.second;
      g.items = std::move(items);
      g.slots = kind == Kind::Interior ? 4 * n * n : (kind == Kind::Neumann ? 0 : n * n);
      g.load_slots = kind == Kind::Interior ? 0 : n;
      groups_.push_back(std::move(g));
      kinds_.push_back(kind);
    }
  }

  const std::vector<WorkGroup>& groups() const override { return groups_; }

  void compute(std::size_t group, std::size_t item, LocalContribution& out) const override {
    const WorkGroup& g = groups_[group];
    const int id = g.items[item];
    const int order = kernel_order(g.degree, config_.quadrature_increment);
    const Discretization& disc = slab_.disc;
    switch (kinds_[group]) {
      case Kind::Element:
        prism_kernel(id, order, out);
        return;
      case Kind::Interior: {
        const int fi = disc.subface_face[id];
        interior_face_kernel(disc, block_, id, setup_.sigma[fi], setup_.downwind[fi], order, config_.hooks,
                             RowSide::Both, out);
        return;
      }
      case Kind::Dirichlet:
      case Kind::Inflow:
      case Kind::Neumann: {
        const int fi = disc.subface_face[id];
        boundary_kernel(disc, block_, id, setup_.tags[fi], setup_.sigma[fi], setup_.downwind[fi] == Downwind::Owner,
                        order, config_.hooks, config_.boundary_value, out);
        return;
      }
      case Kind::TimeJump:
        time_jump_kernel(id, order, out);
        return;
    }
  }

 private:
  void prism_kernel(int cell, int order, LocalContribution& out) const {
    const Discretization& disc = slab_.disc;
    const int s = slab_.spatial_dim();
    const int d = disc.dim;
    const int e = disc.cell_element[cell];
    const BasisSpec& basis = disc.elements[e].basis;
    const int n = static_cast<int>(basis.size());
    thread_local MappedRule rule;
    thread_local std::vector<double> vals, grads, ag, lower;
    cell_quadrature(disc.cells[cell], d, order, rule);
    vals.resize(n);
    grads.resize(static_cast<std::size_t>(n) * d);
    ag.resize(static_cast<std::size_t>(n) * s);
    lower.resize(n);
    double* block = out.add_block(e, e, n, n);
    double* load = out.add_load(e, n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec& x = rule.points[q];
      const double w = rule.weights[q];
      basis.evaluate(x, vals, grads);
      const Tensor a = st_.a(x);
      const Vec wv = st_.w(x);
      const double c = st_.c(x);
      const double f = st_.f(x);
      for (int j = 0; j < n; ++j) {
        const double* gj = &grads[j * d];
        double t = gj[s] + c * vals[j];  // time derivative + reaction
        for (int k = 0; k < s; ++k) {
          double u = 0.0;
          for (int l = 0; l < s; ++l) u += a[k][l] * gj[l];
          ag[j * s + k] = u;
          t += wv[k] * gj[k];
        }
        lower[j] = t;
      }
      for (int r = 0; r < n; ++r) {
        const double* gr = &grads[r * d];
        double* row = block + r * n;
        for (int j = 0; j < n; ++j) {
          double t = lower[j] * vals[r];
          for (int k = 0; k < s; ++k) t += ag[j * s + k] * gr[k];
          row[j] += w * t;
        }
        load[r] += w * f * vals[r];
      }
    }
  }

  // (U+, W+) on the bottom facet and (u_prev, W+) on the right-hand side.
  void time_jump_kernel(int subface, int order, LocalContribution& out) const {
    const Discretization& disc = slab_.disc;
    const int e = disc.faces[disc.subface_face[subface]].owner;
    const BasisSpec& basis = disc.elements[e].basis;
    const int n = static_cast<int>(basis.size());
    thread_local MappedRule rule;
    thread_local std::vector<double> vals;
    cell_quadrature(disc.subfaces[subface], disc.dim, order, rule);
    vals.resize(n);
    double* block = out.add_block(e, e, n, n);
    double* load = out.add_load(e, n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec& x = rule.points[q];
      const double w = rule.weights[q];
      basis.evaluate(x, vals);
      const double up = previous_value(prev_, st_, e, x);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) block[j * n + i] += w * vals[i] * vals[j];
        load[j] += w * up * vals[j];
      }
    }
  }

  const SlabMesh& slab_;
  const SpaceTimeCoefficients& st_;
  const PdeCoefficients& block_;
  const AssemblyConfig& config_;
  const FaceSetup& setup_;
  const PreviousSlab& prev_;
  std::vector<WorkGroup> groups_;
  std::vector<Kind> kinds_;
};

}  // namespace

AssemblyResult assemble_slab(const SlabMesh& slab, const SpaceTimeCoefficients& st, const AssemblyConfig& config,
                             const PreviousSlab& prev) {
  check_previous(slab, prev);
  const PdeCoefficients block = block_coefficients(st);
  const FaceSetup setup = prepare_faces(slab.disc, block, config, true);
  const SlabSource source(slab, st, block, config, setup, prev);
  return run_assembly(source, RowLayout::all(slab.disc.offsets), block_adjacency(slab.disc), config.engine());
}

AssemblyResult assemble_slab_generic(const SlabMesh& slab, const SpaceTimeCoefficients& st,
                                     const AssemblyConfig& config, const PreviousSlab& prev) {
  check_previous(slab, prev);
  const PdeCoefficients block = block_coefficients(st);
  AssemblyConfig cfg = config;
  const Discretization& disc = slab.disc;
  cfg.boundary_value = [&](int face, const Vec& x) {
    const FaceData& f = disc.faces[face];
    if (f.kind == FaceKind::SlabBottom) return previous_value(prev, st, f.owner, x);
    return config.boundary_value ? config.boundary_value(face, x) : st.g_D(x);
  };
  return assemble(disc, block, cfg);
}

MarchResult march(const PolytopicMesh& spatial, const TimePartition& time, const SpaceTimeCoefficients& st,
                  std::span<const int> degrees, Family family, const AssemblyConfig& config,
                  const SolverOptions& solver) {
  time.validate();
  if (st.spatial_dim != spatial.dim()) throw std::invalid_argument("march: coefficient and mesh dimensions differ");
  MarchResult out;
  out.slabs.reserve(time.num_slabs());
  for (std::size_t n = 0; n < time.num_slabs(); ++n) {
    out.slabs.push_back(build_slab(spatial, time.nodes[n], time.nodes[n + 1], degrees, family));
    PreviousSlab prev;
    if (n > 0) {
      prev.disc = &out.slabs[n - 1].disc;
      prev.coeffs = out.solutions[n - 1];
    }
    AssemblyResult sys = assemble_slab(out.slabs[n], st, config, prev);
    SolverResult sol = solve(sys.matrix, sys.load, out.slabs[n].disc.offsets, solver);
    if (!sol.converged)
      throw std::runtime_error("slab " + std::to_string(n) + ": solver stopped at relative residual " +
                               std::to_string(sol.relative_residual) + " after " + std::to_string(sol.iterations) +
                               " iterations");
    out.solutions.push_back(std::move(sol.x));
    out.stats.push_back(std::move(sys.stats));
    out.iterations.push_back(sol.iterations);
  }
  return out;
}

namespace {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

}  // namespace

void write_solution_binary(const std::filesystem::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::uint64_t n = to_little<std::uint64_t>(values.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (double v : values) {
    const double le = to_little(v);
    out.write(reinterpret_cast<const char*>(&le), sizeof le);
  }
}

std::vector<double> read_solution_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::uint64_t n = 0;
  if (!in.read(reinterpret_cast<char*>(&n), sizeof n)) throw std::runtime_error(path.string() + ": missing header");
  n = to_little(n);
  std::vector<double> values(n);
  for (auto& v : values) {
    double le = 0.0;
    if (!in.read(reinterpret_cast<char*>(&le), sizeof le)) throw std::runtime_error(path.string() + ": truncated");
    v = to_little(le);
  }
  return values;
}

}  // namespace polydg
