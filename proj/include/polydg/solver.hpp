#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polydg/sparse.hpp"

namespace polydg {

struct SolverOptions {
  double tol = 1e-10;  // relative residual ||b - Ax|| / ||b||
  int max_iter = 5000;
  int restart = 60;
};

struct SolverResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;  // recomputed from the returned x
  bool converged = false;
};

/// Restarted GMRES, right-preconditioned by the inverse diagonal blocks given
/// by `block_offsets` (element DoF ranges; empty means 1x1 blocks). The
/// residual is recomputed explicitly before each convergence claim.
SolverResult solve(const SparseMatrix& a, std::span<const double> rhs, std::span<const std::int64_t> block_offsets,
                   const SolverOptions& options = {});

/// ||b - A x||_2 / ||b||_2 (or ||b - A x|| when b = 0).
double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> rhs);

/// Dense LU solve, used as an oracle on small systems.
std::vector<double> dense_solve(const SparseMatrix& a, std::span<const double> rhs);

}  // namespace polydg
