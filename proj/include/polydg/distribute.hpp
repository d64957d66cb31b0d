#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "polydg/assembly.hpp"
#include "polydg/discretization.hpp"
#include "polydg/sparse.hpp"

namespace polydg {

struct Partition {
  int n_parts = 0;
  std::vector<int> part;                // element -> part
  std::vector<std::vector<int>> owned;  // ascending element ids per part
  std::vector<int> cut_interfaces;      // interface ids whose elements lie in different parts
  std::vector<double> weights;          // per-part weight totals

  /// Rebuilds owned lists, cut set and weights from `part`.
  static Partition from_map(std::vector<int> part, int n_parts, const Discretization& disc,
                            std::span<const double> element_weights);
  /// Throws std::invalid_argument on an empty part or an inconsistent cut set.
  void validate(const Discretization& disc) const;
  /// max_k |w_k - mean| / mean.
  double imbalance() const;
};

/// Quadrature-cost model: subdivision cells x volume quadrature points x n_kappa^2.
std::vector<double> quadrature_cost_weights(const Discretization& disc, int quadrature_increment = 2);

struct PartitionOptions {
  std::uint64_t seed = 1;
  double balance_tolerance = 0.02;  // allowed drift per bisection during refinement
  int refinement_passes = 8;
};

/// Recursive greedy graph-growing bisection over the interface graph with
/// boundary refinement by single moves and pair swaps. Deterministic for a
/// given seed. Throws std::invalid_argument when n_parts exceeds the element count.
Partition partition_mesh(const Discretization& disc, int n_parts, std::span<const double> element_weights,
                         const PartitionOptions& options = {});

/// Owned rows of one part with global columns.
struct PartialMatrix {
  int part = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> row_ranges;  // global [begin, end), ascending, merged
  SparseMatrix matrix;
  std::vector<double> load;
  AssemblyStats stats;

  std::int64_t num_rows() const { return matrix.n_rows; }
};

/// Approach 2 over the owned elements of `part_id`. Interfaces to foreign
/// elements go through the cut kernel, which writes the owner's rows only.
/// Reads `disc`, `coeffs` and `setup` only.
PartialMatrix assemble_partition(const Discretization& disc, const PdeCoefficients& coeffs,
                                 const AssemblyConfig& config, const FaceSetup& setup, const Partition& partition,
                                 int part_id);

/// Every part, `concurrent_parts` at a time.
std::vector<PartialMatrix> assemble_partitions(const Discretization& disc, const PdeCoefficients& coeffs,
                                               const AssemblyConfig& config, const Partition& partition,
                                               int concurrent_parts = 1);

/// Places each partial's rows by its row ranges. Throws std::invalid_argument
/// on a coverage gap or overlap.
SparseMatrix gather_and_verify(std::span<const PartialMatrix> partials, std::int64_t n_rows,
                               std::vector<double>* load = nullptr);

/// One part id per line.
void write_partition_map(const std::filesystem::path& path, const Partition& partition);
std::vector<int> read_partition_map(const std::filesystem::path& path);

/// `<stem>.mtx` plus `<stem>.rows` listing `part n_cols` and then one
/// `begin end` global row range per line.
void write_partial(const std::filesystem::path& stem, const PartialMatrix& partial);
PartialMatrix read_partial(const std::filesystem::path& stem);

}  // namespace polydg
