#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "polydg/assembly.hpp"
#include "polydg/discretization.hpp"
#include "polydg/mesh.hpp"
#include "polydg/pde.hpp"
#include "polydg/solver.hpp"

namespace polydg {

/// 0 = t_0 < t_1 < ... < t_N = T.
struct TimePartition {
  std::vector<double> nodes;

  static TimePartition uniform(double t_end, int steps);
  std::size_t num_slabs() const { return nodes.size() - 1; }
  double tau(std::size_t n) const { return nodes[n + 1] - nodes[n]; }
  /// Throws std::invalid_argument unless strictly increasing from 0.
  void validate() const;
};

/// Prisms I_n x kappa over a spatial polytopic mesh. Face k < spatial.faces.size()
/// is the lateral face over spatial face k; then one bottom face and one top
/// face per element (in element order).
struct SlabMesh {
  const PolytopicMesh* spatial = nullptr;
  double t0 = 0.0;
  double t1 = 0.0;
  Discretization disc;

  int spatial_dim() const { return disc.dim - 1; }
  int bottom_face(std::size_t element) const;
  int top_face(std::size_t element) const;
};

SlabMesh build_slab(const PolytopicMesh& spatial, double t0, double t1, std::span<const int> degrees, Family family);

/// Solution of the previous slab, or the initial condition when `disc` is null.
struct PreviousSlab {
  const Discretization* disc = nullptr;
  std::span<const double> coeffs;
};

/// u_prev at the bottom of `element` (the previous slab's trace from below).
double previous_value(const PreviousSlab& prev, const SpaceTimeCoefficients& st, int element, const Vec& xt);

/// Slab system from the slab-structured kernels: prism volume terms with an
/// explicit time derivative, lateral face terms, and the time-jump term on
/// each bottom facet. Top facets contribute nothing.
AssemblyResult assemble_slab(const SlabMesh& slab, const SpaceTimeCoefficients& st, const AssemblyConfig& config,
                             const PreviousSlab& prev);

/// Same system through the generic d-dimensional kernels with the block
/// coefficients; bottom facets are classified as inflow and receive u_prev.
AssemblyResult assemble_slab_generic(const SlabMesh& slab, const SpaceTimeCoefficients& st,
                                     const AssemblyConfig& config, const PreviousSlab& prev);

struct MarchResult {
  std::vector<SlabMesh> slabs;
  std::vector<std::vector<double>> solutions;
  std::vector<AssemblyStats> stats;
  std::vector<int> iterations;
};

/// Assemble and solve slab by slab. Throws std::runtime_error naming the
/// slab when the solver does not converge.
MarchResult march(const PolytopicMesh& spatial, const TimePartition& time, const SpaceTimeCoefficients& st,
                  std::span<const int> degrees, Family family, const AssemblyConfig& config,
                  const SolverOptions& solver);

/// Little-endian: uint64 N, then N float64 values.
void write_solution_binary(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_solution_binary(const std::filesystem::path& path);

/// Value of a discrete function at x inside `element`.
double evaluate_solution(const Discretization& disc, std::span<const double> u, int element, const Vec& x);

}  // namespace polydg
