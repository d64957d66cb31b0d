#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "polydg/discretization.hpp"
#include "polydg/engine.hpp"
#include "polydg/pde.hpp"

namespace polydg {

/// Test-only switches for isolating parts of the face terms.
struct KernelHooks {
  std::optional<double> sigma_override;
  bool suppress_consistency = false;  // drop the {A grad} . [.] terms
};

/// Replaces g_D(x) on face `face`; used for slab bottoms and tests.
using BoundaryValue = std::function<double(int face, const Vec& x)>;

struct AssemblyConfig {
  Approach approach = Approach::Pattern;
  Accumulation accumulation = Accumulation::Deterministic;
  int workers = 1;
  int quadrature_increment = 2;
  PenaltyConfig penalty;
  DirichletPredicate predicate;
  BoundaryValue boundary_value;
  KernelHooks hooks;

  EngineOptions engine() const { return {approach, accumulation, workers}; }
};

/// Quadrature order for products of degree-p functions: 2p + increment, capped.
int kernel_order(int degree, int increment);

/// Downwind side of an interior face: where b . n_kappa < 0.
enum class Downwind : std::int8_t { None, Owner, Neighbor };

/// Face-level data fixed before any kernel runs.
struct FaceSetup {
  std::vector<BoundaryTag> tags;
  std::vector<double> sigma;
  std::vector<Downwind> downwind;
};

/// max over the element's volume quadrature points of n^T A(x) n.
double element_a_bar(const Discretization& disc, std::size_t element, const Vec& normal,
                     const std::function<Tensor(const Vec&)>& diffusion, int order);

/// Penalty of one face from the shared discretization (both sides).
double face_sigma(const Discretization& disc, std::size_t face, const std::function<Tensor(const Vec&)>& diffusion,
                  const PenaltyConfig& penalty, int increment);

/// Tags, penalties and upwind sides for every face. With
/// `structural_slab_faces`, slab bottoms are tagged Inflow and tops Outflow
/// without sampling the coefficients.
FaceSetup prepare_faces(const Discretization& disc, const PdeCoefficients& coeffs, const AssemblyConfig& config,
                        bool structural_slab_faces = false);

/// Quadrature points and weights of one sub-face (or cell) at `order`.
void cell_quadrature(const Cell& cell, int dim, int order, MappedRule& out);

/// Volume terms of one integration cell: block (e, e) and the source load.
void element_kernel(const Discretization& disc, const PdeCoefficients& coeffs, int cell, int order,
                    LocalContribution& out);

/// Which row blocks an interior sub-face writes (both, or one side for cut faces).
enum class RowSide { Both, OwnerOnly, NeighborOnly };

/// Interior-penalty and upwind terms of one interior sub-face.
void interior_face_kernel(const Discretization& disc, const PdeCoefficients& coeffs, int subface, double sigma,
                          Downwind downwind, int order, const KernelHooks& hooks, RowSide side,
                          LocalContribution& out);

/// Dirichlet, Inflow or Neumann terms of one boundary sub-face. `inflow`
/// adds the upwind term on Dirichlet faces where b . n < 0.
void boundary_kernel(const Discretization& disc, const PdeCoefficients& coeffs, int subface, BoundaryTag tag,
                     double sigma, bool inflow, int order, const KernelHooks& hooks,
                     const BoundaryValue& boundary_value, LocalContribution& out);

/// Work groups of the five kernels over a discretization. With `owned`
/// non-empty only rows of those elements are produced; interior faces
/// between an owned and a foreign element form the `interior_cut` group.
class DgSource : public ContributionSource {
 public:
  DgSource(const Discretization& disc, const PdeCoefficients& coeffs, const AssemblyConfig& config,
           const FaceSetup& setup, std::vector<int> owned = {});

  const std::vector<WorkGroup>& groups() const override { return groups_; }
  void compute(std::size_t group, std::size_t item, LocalContribution& out) const override;

 private:
  enum class Kind { Element, Interior, InteriorCut, Dirichlet, Inflow, Neumann };
  const Discretization& disc_;
  const PdeCoefficients& coeffs_;
  const AssemblyConfig& config_;
  const FaceSetup& setup_;
  std::vector<bool> owned_;
  std::vector<WorkGroup> groups_;
  std::vector<Kind> kinds_;
};

/// Assembles the full matrix and load vector with the configured approach.
AssemblyResult assemble(const Discretization& disc, const PdeCoefficients& coeffs, const AssemblyConfig& config);
AssemblyResult assemble_approach1(const Discretization& disc, const PdeCoefficients& coeffs, AssemblyConfig config);
AssemblyResult assemble_approach2(const Discretization& disc, const PdeCoefficients& coeffs, AssemblyConfig config);

/// Block structure of the global matrix.
struct BlockPattern {
  std::vector<std::int64_t> offsets;
  std::vector<std::array<int, 2>> blocks;  // (row element, column element), row-major order
  SparseMatrix skeleton;
};

BlockPattern build_block_pattern(const Discretization& disc, int workers = 1);

}  // namespace polydg
