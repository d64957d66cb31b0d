#include "polydg/study.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "polydg/discretization.hpp"
#include "polydg/meshgen.hpp"
#include "polydg/spacetime.hpp"

namespace polydg {

namespace {

int suffix_number(const std::string& spec, std::size_t prefix) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(spec.substr(prefix), &used);
    if (used + prefix == spec.size() && v >= 1) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad agglomerate value '" + spec + "'");
}

}  // namespace

PolytopicMesh build_mesh(const RunConfig& cfg) { return build_mesh(cfg, cfg.mesh_n); }

PolytopicMesh build_mesh(const RunConfig& cfg, int mesh_n) {
  SimplicialMesh fine;
  if (!cfg.mesh.empty()) {
    fine = load_simplicial_mesh(cfg.mesh);
    if (!cfg.agglomeration.empty())
      return agglomerate(fine, load_agglomeration_map(cfg.agglomeration, fine.num_simplices()));
  } else if (cfg.mesh_gen == "square") {
    fine = unit_square_mesh(mesh_n, cfg.jitter, cfg.seed);
  } else {
    fine = unit_cube_mesh(mesh_n, cfg.jitter, cfg.seed);
  }
  if (cfg.agglomerate == "none") return identity_agglomeration(fine);
  if (cfg.agglomerate.rfind("block:", 0) == 0) {
    const int r = suffix_number(cfg.agglomerate, 6);
    if (mesh_n % r != 0)
      throw ConfigError("block:" + std::to_string(r) + " does not divide mesh_n = " + std::to_string(mesh_n));
    return agglomerate(fine, block_agglomeration(fine, mesh_n / r));
  }
  return agglomerate(fine, seeded_agglomeration(fine, suffix_number(cfg.agglomerate, 7), cfg.seed));
}

Family family_of(const RunConfig& cfg) { return cfg.family == "PQ" ? Family::SpaceTime : Family::TotalDegree; }

AssemblyConfig assembly_config(const RunConfig& cfg, const NamedProblem& problem, std::size_t num_elements) {
  AssemblyConfig a;
  a.approach = cfg.approach == 1 ? Approach::TripletSort : Approach::Pattern;
  a.accumulation = cfg.accumulation == "atomic" ? Accumulation::Atomic : Accumulation::Deterministic;
  a.workers = cfg.workers;
  a.quadrature_increment = cfg.quadrature_increment;
  a.penalty.c_sigma = cfg.c_sigma;
  a.penalty.coverable.assign(num_elements, cfg.coverable);
  a.predicate = problem.predicate;
  return a;
}

SolverOptions solver_options(const RunConfig& cfg) { return {cfg.tol, cfg.max_iter, cfg.restart}; }

LevelResult run_level(const RunConfig& cfg, int mesh_n, int time_steps) {
  const NamedProblem problem = named_problem(cfg.problem);
  const PolytopicMesh mesh = build_mesh(cfg, mesh_n);
  const int want_dim = problem.space_time ? problem.st.spatial_dim : problem.coeffs.dim;
  if (mesh.dim() != want_dim)
    throw ConfigError(cfg.problem + " needs a " + std::to_string(want_dim) + "D mesh, got " +
                      std::to_string(mesh.dim()) + "D");
  const AssemblyConfig acfg = assembly_config(cfg, problem, mesh.num_elements());
  const int degree = cfg.degree;

  LevelResult r;
  r.mesh_n = mesh_n;
  r.h = mesh_size(mesh);
  try {
    if (problem.space_time) {
      r.time_steps = time_steps;
      const MarchResult m = march(mesh, TimePartition::uniform(cfg.t_end, time_steps), problem.st,
                                  std::span(&degree, 1), family_of(cfg), acfg, solver_options(cfg));
      const PdeCoefficients block = block_coefficients(problem.st);
      std::vector<ErrorReport> parts;
      for (std::size_t n = 0; n < m.slabs.size(); ++n) {
        parts.push_back(compute_errors(m.slabs[n].disc, block, m.solutions[n], acfg, true));
        parts.back().timings = m.stats[n].kernels;
        r.iterations += m.iterations[n];
      }
      r.errors = combine_reports(parts);
    } else {
      const Discretization disc = discretize(mesh, std::span(&degree, 1), family_of(cfg));
      const AssemblyResult sys = assemble(disc, problem.coeffs, acfg);
      const SolverResult sol = solve(sys.matrix, sys.load, disc.offsets, solver_options(cfg));
      r.iterations = sol.iterations;
      if (!sol.converged)
        throw std::runtime_error("solver stopped at relative residual " + std::to_string(sol.relative_residual));
      r.errors = compute_errors(disc, problem.coeffs, sol.x, acfg);
      r.errors.timings = sys.stats.kernels;
    }
  } catch (const std::runtime_error& e) {
    r.ok = false;
    r.message = e.what();
  }
  r.errors.h_max = r.h;
  return r;
}

std::vector<double> convergence_orders(std::span<const double> h, std::span<const double> e, double floor) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    const bool usable = std::isfinite(e[k]) && std::isfinite(e[k + 1]) && e[k] > floor && e[k + 1] > floor;
    out.push_back(usable ? std::log(e[k] / e[k + 1]) / std::log(h[k] / h[k + 1])
                         : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

std::vector<LevelResult> convergence_study(const RunConfig& cfg) {
  if (cfg.levels.size() < 3) throw ConfigError("a convergence study needs at least three levels");
  std::vector<LevelResult> out;
  for (std::size_t k = 0; k < cfg.levels.size(); ++k) {
    const int n = cfg.levels[k];
    const int steps = static_cast<int>(std::lround(static_cast<double>(cfg.time_steps) * n / cfg.levels[0]));
    out.push_back(run_level(cfg, n, std::max(1, steps)));
    out.back().level = static_cast<int>(k);
  }
  return out;
}

void write_study_csv(std::ostream& out, std::span<const LevelResult> levels, double floor) {
  std::vector<double> h, l2, en;
  for (const auto& l : levels) {
    h.push_back(l.h);
    l2.push_back(l.ok ? l.errors.l2 : std::numeric_limits<double>::quiet_NaN());
    en.push_back(l.ok ? l.errors.energy : std::numeric_limits<double>::quiet_NaN());
  }
  const auto l2o = convergence_orders(h, l2, floor);
  const auto eno = convergence_orders(h, en, floor);
  auto order = [&](const std::vector<double>& orders, const std::vector<double>& errs, std::size_t k) -> std::string {
    if (k == 0 || !levels[k].ok || !levels[k - 1].ok) return "";
    if (std::isnan(orders[k - 1])) return errs[k] <= floor || errs[k - 1] <= floor ? "saturated" : "";
    std::ostringstream s;
    s.precision(4);
    s << std::fixed << orders[k - 1];
    return s.str();
  };
  const auto old_precision = out.precision(10);
  out << "level,h,dofs,l2_error,energy_error,l2_order,energy_order\n";
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const LevelResult& l = levels[k];
    out << l.level << ',' << l.h << ',' << l.errors.dofs << ',';
    if (l.ok) out << l.errors.l2 << ',' << l.errors.energy << ',';
    else out << "failed,failed,";
    out << order(l2o, l2, k) << ',' << order(eno, en, k) << '\n';
  }
  for (const LevelResult& l : levels)
    if (!l.ok) out << "# level " << l.level << ": " << l.message << '\n';
  out.precision(old_precision);
}

std::vector<BenchRun> run_benchmark(const RunConfig& cfg) {
  const NamedProblem problem = named_problem(cfg.problem);
  const PolytopicMesh mesh = build_mesh(cfg);
  const int degree = cfg.degree;
  std::vector<BenchRun> runs;
  std::optional<SlabMesh> slab;
  std::optional<Discretization> disc;
  if (problem.space_time) slab = build_slab(mesh, 0.0, cfg.t_end / cfg.time_steps, std::span(&degree, 1), family_of(cfg));
  else disc = discretize(mesh, std::span(&degree, 1), family_of(cfg));

  for (const Approach approach : {Approach::TripletSort, Approach::Pattern})
    for (const int workers : cfg.bench_workers) {
      AssemblyConfig acfg = assembly_config(cfg, problem, mesh.num_elements());
      acfg.approach = approach;
      acfg.workers = workers;
      BenchRun best{approach, workers, {}};
      for (int rep = 0; rep < cfg.repeat; ++rep) {
        AssemblyResult r = problem.space_time ? assemble_slab(*slab, problem.st, acfg, PreviousSlab{})
                                              : assemble(*disc, problem.coeffs, acfg);
        if (rep == 0 || r.stats.total_seconds < best.stats.total_seconds) best.stats = std::move(r.stats);
      }
      runs.push_back(std::move(best));
    }
  return runs;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRun> runs) {
  const auto old_precision = out.precision(6);
  out << "approach,workers,kernel,work_items,seconds,nnz_written\n";
  for (const BenchRun& r : runs) {
    const int a = static_cast<int>(r.approach);
    for (const KernelTiming& k : r.stats.kernels)
      out << a << ',' << r.workers << ',' << k.kernel << ',' << k.work_items << ',' << k.seconds << ','
          << k.nnz_written << '\n';
    out << a << ',' << r.workers << ",indices,," << r.stats.index_seconds << ",\n";
    out << a << ',' << r.workers << ",reduce,," << r.stats.reduce_seconds << ",\n";
    out << a << ',' << r.workers << ",total,," << r.stats.total_seconds << ',' << r.stats.nnz << '\n';
    out << a << ',' << r.workers << ",triplets," << r.stats.triplets << ",," << r.stats.nnz << '\n';
  }
  out.precision(old_precision);
}

}  // namespace polydg
