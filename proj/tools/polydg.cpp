// polydg: assemble, solve and study dG discretizations on agglomerated meshes.
//
//   polydg <command> [-c run.cfg] [key=value ...]
//
// Keys on the command line override the config file. Outputs are written
// next to the `output` prefix.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "polydg/config.hpp"
#include "polydg/discretization.hpp"
#include "polydg/distribute.hpp"
#include "polydg/spacetime.hpp"
#include "polydg/study.hpp"

using namespace polydg;

namespace {

struct Context {
  RunConfig cfg;
  NamedProblem problem;
  PolytopicMesh mesh;
  AssemblyConfig acfg;
};

Context prepare(const std::string& config_path, const std::vector<std::string>& overrides) {
  Context ctx;
  if (!config_path.empty()) ctx.cfg = load_config(config_path);
  for (const auto& o : overrides) apply_override(ctx.cfg, o);
  validate(ctx.cfg);
  ctx.problem = named_problem(ctx.cfg.problem);
  ctx.mesh = build_mesh(ctx.cfg);
  ctx.acfg = assembly_config(ctx.cfg, ctx.problem, ctx.mesh.num_elements());
  return ctx;
}

std::string out_path(const RunConfig& cfg, const std::string& suffix) { return cfg.output + suffix; }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void write_vector(const std::string& path, const std::vector<double>& v) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);
  for (double x : v) std::fprintf(f, "%.17g\n", x);
  std::fclose(f);
}

int cmd_assemble(Context& ctx) {
  const int p = ctx.cfg.degree;
  AssemblyResult r;
  if (ctx.problem.space_time) {
    const SlabMesh slab = build_slab(ctx.mesh, 0.0, ctx.cfg.t_end / ctx.cfg.time_steps, std::span(&p, 1),
                                     family_of(ctx.cfg));
    r = assemble_slab(slab, ctx.problem.st, ctx.acfg, PreviousSlab{});
  } else {
    const Discretization disc = discretize(ctx.mesh, std::span(&p, 1), family_of(ctx.cfg));
    r = assemble(disc, ctx.problem.coeffs, ctx.acfg);
  }
  write_matrix_market(out_path(ctx.cfg, ".mtx"), r.matrix);
  write_vector(out_path(ctx.cfg, "_load.txt"), r.load);
  auto stats = open_out(out_path(ctx.cfg, "_stats.csv"));
  write_stats_csv(stats, r.stats);
  std::cout << "rows " << r.matrix.n_rows << ", nnz " << r.matrix.nnz() << ", assembly " << r.stats.total_seconds
            << " s\n";
  return 0;
}

void write_errors(const RunConfig& cfg, const ErrorReport& e, int iterations) {
  auto out = open_out(out_path(cfg, "_errors.csv"));
  out.precision(10);
  out << "dofs,h,l2_error,energy_error,iterations\n"
      << e.dofs << ',' << e.h_max << ',' << e.l2 << ',' << e.energy << ',' << iterations << '\n';
  std::cout << "dofs " << e.dofs << ", h " << e.h_max << ", L2 error " << e.l2 << ", energy error " << e.energy
            << '\n';
}

int cmd_solve(Context& ctx) {
  if (ctx.problem.space_time)
    throw ConfigError(ctx.cfg.problem + " is a space-time problem; use `polydg march`");
  const int p = ctx.cfg.degree;
  const Discretization disc = discretize(ctx.mesh, std::span(&p, 1), family_of(ctx.cfg));
  const AssemblyResult r = assemble(disc, ctx.problem.coeffs, ctx.acfg);
  const SolverResult sol = solve(r.matrix, r.load, disc.offsets, solver_options(ctx.cfg));
  write_solution_binary(out_path(ctx.cfg, "_solution.bin"), sol.x);
  std::cout << "GMRES " << sol.iterations << " iterations, relative residual " << sol.relative_residual << '\n';
  if (!sol.converged) {
    std::cerr << "solver did not reach tol = " << ctx.cfg.tol << '\n';
    return 2;
  }
  ErrorReport e = compute_errors(disc, ctx.problem.coeffs, sol.x, ctx.acfg);
  e.h_max = mesh_size(ctx.mesh);
  write_errors(ctx.cfg, e, sol.iterations);
  return 0;
}

int cmd_march(Context& ctx) {
  if (!ctx.problem.space_time) throw ConfigError(ctx.cfg.problem + " is stationary; use `polydg solve`");
  const int p = ctx.cfg.degree;
  const TimePartition time = TimePartition::uniform(ctx.cfg.t_end, ctx.cfg.time_steps);
  const MarchResult m =
      march(ctx.mesh, time, ctx.problem.st, std::span(&p, 1), family_of(ctx.cfg), ctx.acfg, solver_options(ctx.cfg));
  auto csv = open_out(out_path(ctx.cfg, "_march.csv"));
  csv << "slab,t0,t1,dofs,iterations\n";
  const PdeCoefficients block = block_coefficients(ctx.problem.st);
  std::vector<ErrorReport> reports;
  int iterations = 0;
  for (std::size_t n = 0; n < m.slabs.size(); ++n) {
    write_solution_binary(out_path(ctx.cfg, "_slab" + std::to_string(n) + ".bin"), m.solutions[n]);
    csv << n << ',' << m.slabs[n].t0 << ',' << m.slabs[n].t1 << ',' << m.slabs[n].disc.num_dofs() << ','
        << m.iterations[n] << '\n';
    reports.push_back(compute_errors(m.slabs[n].disc, block, m.solutions[n], ctx.acfg, true));
    iterations += m.iterations[n];
  }
  ErrorReport e = combine_reports(reports);
  e.h_max = mesh_size(ctx.mesh);
  write_errors(ctx.cfg, e, iterations);
  return 0;
}

int cmd_partition(Context& ctx) {
  if (ctx.problem.space_time) throw ConfigError("partition runs on stationary problems");
  const int p = ctx.cfg.degree;
  const Discretization disc = discretize(ctx.mesh, std::span(&p, 1), family_of(ctx.cfg));
  PartitionOptions popt;
  popt.seed = ctx.cfg.seed;
  const Partition part =
      partition_mesh(disc, ctx.cfg.parts, quadrature_cost_weights(disc, ctx.cfg.quadrature_increment), popt);
  write_partition_map(out_path(ctx.cfg, "_parts.txt"), part);
  const auto partials = assemble_partitions(disc, ctx.problem.coeffs, ctx.acfg, part, ctx.cfg.workers);
  auto csv = open_out(out_path(ctx.cfg, "_partition.csv"));
  csv << "part,elements,weight,rows,nnz,index_seconds,total_seconds\n";
  for (const PartialMatrix& pm : partials) {
    write_partial(out_path(ctx.cfg, "_part" + std::to_string(pm.part)), pm);
    csv << pm.part << ',' << part.owned[pm.part].size() << ',' << part.weights[pm.part] << ',' << pm.num_rows() << ','
        << pm.matrix.nnz() << ',' << pm.stats.index_seconds << ',' << pm.stats.total_seconds << '\n';
  }
  AssemblyConfig mono = ctx.acfg;
  mono.approach = Approach::Pattern;
  const AssemblyResult full = assemble(disc, ctx.problem.coeffs, mono);
  const SparseMatrix stacked = gather_and_verify(partials, disc.num_dofs());
  const double diff = relative_difference(stacked, full.matrix);
  std::cout << part.n_parts << " parts, " << part.cut_interfaces.size() << " cut interfaces, imbalance "
            << part.imbalance() << ", stacked vs monolithic " << diff << '\n';
  return diff <= 1e-10 ? 0 : 3;
}

int cmd_study(Context& ctx) {
  const auto levels = convergence_study(ctx.cfg);
  auto out = open_out(out_path(ctx.cfg, "_study.csv"));
  write_study_csv(out, levels);
  write_study_csv(std::cout, levels);
  for (const auto& l : levels)
    if (!l.ok) return 2;
  return 0;
}

int cmd_bench(Context& ctx) {
  const auto runs = run_benchmark(ctx.cfg);
  auto out = open_out(out_path(ctx.cfg, "_bench.csv"));
  write_bench_csv(out, runs);
  write_bench_csv(std::cout, runs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discontinuous Galerkin assembly on agglomerated polytopic meshes"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "key=value config file")->check(CLI::ExistingFile);

  using Command = int (*)(Context&);
  const std::vector<std::tuple<const char*, const char*, Command>> commands = {
      {"assemble", "assemble the matrix and load vector (first slab for space-time problems)", cmd_assemble},
      {"solve", "assemble, solve and report errors of a stationary problem", cmd_solve},
      {"march", "solve a space-time problem slab by slab", cmd_march},
      {"partition", "partition the mesh and assemble one partial matrix per part", cmd_partition},
      {"study", "convergence study over the mesh levels in `levels`", cmd_study},
      {"bench", "time both assembly approaches", cmd_bench},
  };
  Command chosen = nullptr;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("overrides", overrides, "key=value overrides");
    sub->callback([&chosen, fn = fn] { chosen = fn; });
  }
  std::string keys;
  for (const auto& k : config_keys()) keys += (keys.empty() ? "" : ", ") + k;
  app.footer("Config keys: " + keys);
  CLI11_PARSE(app, argc, argv);

  try {
    Context ctx = prepare(config_path, overrides);
    return chosen(ctx);
  } catch (const std::exception& e) {
    std::cerr << "polydg: " << e.what() << '\n';
    return 1;
  }
}
