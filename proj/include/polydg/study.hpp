#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "polydg/assembly.hpp"
#include "polydg/config.hpp"
#include "polydg/errors.hpp"
#include "polydg/mesh.hpp"
#include "polydg/problems.hpp"
#include "polydg/solver.hpp"

namespace polydg {

/// Mesh described by the config: a file pair, or a generated mesh with
/// `mesh_n` cells per side, agglomerated as requested.
PolytopicMesh build_mesh(const RunConfig& cfg);
PolytopicMesh build_mesh(const RunConfig& cfg, int mesh_n);

/// `coverable` marks all `num_elements` elements.
AssemblyConfig assembly_config(const RunConfig& cfg, const NamedProblem& problem, std::size_t num_elements);
SolverOptions solver_options(const RunConfig& cfg);
Family family_of(const RunConfig& cfg);

struct LevelResult {
  int level = 0;
  int mesh_n = 0;
  int time_steps = 0;  // 0 for stationary problems
  double h = 0.0;
  bool ok = true;
  std::string message;  // solver failure, when !ok
  ErrorReport errors;
  int iterations = 0;
};

/// Assemble, solve and measure one level (a full march for space-time problems).
LevelResult run_level(const RunConfig& cfg, int mesh_n, int time_steps);

/// log(e_k / e_{k+1}) / log(h_k / h_{k+1}); NaN where either error is at or
/// below `floor` (saturated) or not finite.
std::vector<double> convergence_orders(std::span<const double> h, std::span<const double> e, double floor = 0.0);

/// Runs every level in cfg.levels (at least three). Time steps scale with
/// mesh_n relative to the first level. Failed levels are kept with ok = false.
std::vector<LevelResult> convergence_study(const RunConfig& cfg);

/// Header `level,h,dofs,l2_error,energy_error,l2_order,energy_order`.
/// Orders are empty on the first level and `saturated` at the error floor;
/// failed levels have `failed` errors and a `# level k: ...` line after the table.
void write_study_csv(std::ostream& out, std::span<const LevelResult> levels, double floor = 1e-11);

/// Header `approach,workers,kernel,work_items,seconds,nnz_written`. Per
/// configuration: one row per kernel, then `indices`, `reduce`, `total`
/// and `triplets` (work_items = streamed triplets, nnz_written = nnz).
/// Times are the fastest of cfg.repeat runs.
struct BenchRun {
  Approach approach;
  int workers;
  AssemblyStats stats;
};
std::vector<BenchRun> run_benchmark(const RunConfig& cfg);
void write_bench_csv(std::ostream& out, std::span<const BenchRun> runs);

}  // namespace polydg
