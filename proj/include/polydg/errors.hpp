#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polydg/assembly.hpp"
#include "polydg/discretization.hpp"
#include "polydg/engine.hpp"
#include "polydg/mesh.hpp"
#include "polydg/pde.hpp"

namespace polydg {

struct ErrorReport {
  double l2 = 0.0;
  double energy = 0.0;
  double energy_diffusion = 0.0;  // the broken A-weighted seminorm part alone
  std::int64_t dofs = 0;
  double h_max = 0.0;
  std::vector<KernelTiming> timings;
};

/// Errors of u_h against coeffs.exact / coeffs.exact_gradient, integrated
/// over the subdivision at order 2p + 4. With e = u_h - u the energy norm is
///
///   sum_K int A grad e . grad e + c0^2 e^2      c0^2 = max(c - div(b)/2, 0)
///   + sum_F int sigma [e]^2 + 1/2 |b . n| [e]^2
///
/// where boundary faces use the one-sided trace and sigma only enters on
/// interior and Dirichlet faces. div(b) is taken by central differences.
ErrorReport compute_errors(const Discretization& disc, const PdeCoefficients& coeffs, std::span<const double> u,
                           const AssemblyConfig& config, bool structural_slab_faces = false);

/// Largest element diameter.
double mesh_size(const PolytopicMesh& mesh);

/// Square-sums several reports (slabs of one space-time solution).
ErrorReport combine_reports(std::span<const ErrorReport> reports);

}  // namespace polydg
