#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace polydg {

/// Compressed sparse row matrix; columns strictly increasing within a row.
struct SparseMatrix {
  std::int64_t n_rows = 0;
  std::int64_t n_cols = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<std::int32_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return col_idx.size(); }
  /// Stored value at (r, c), or 0 when the entry is not in the pattern.
  double at(std::int64_t r, std::int64_t c) const;
  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// Throws std::logic_error when an invariant is broken.
  void validate() const;
};

/// Stripe layout of one kernel group: work item k writes its s-th entry to
/// base + s * items + k, so consecutive items land on consecutive slots.
struct StripeGroup {
  std::size_t base = 0;
  std::size_t items = 0;
  std::size_t slots = 0;

  std::size_t address(std::size_t item, std::size_t slot) const { return base + slot * items + item; }
};

/// Unsorted coordinate triplets with duplicates. Unused slots carry the
/// sentinel row `sentinel_row` (the number of matrix rows).
struct TripletStream {
  std::vector<std::int32_t> rows;
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
  std::vector<StripeGroup> groups;
  std::int32_t sentinel_row = 0;

  void allocate(std::size_t n, std::int32_t sentinel);
  std::size_t size() const { return vals.size(); }
};

struct TripletMergeStats {
  std::size_t valid_triplets = 0;  // slots not carrying the sentinel
  std::size_t nnz = 0;
};

/// Drops sentinel slots, sorts by (row, col) with a stable parallel merge
/// sort, and sums duplicates in stream order. The result does not depend on
/// `workers`.
SparseMatrix triplets_to_csr(const TripletStream& stream, std::int64_t n_rows, std::int64_t n_cols, int workers,
                             TripletMergeStats* stats = nullptr);

/// Matrix Market coordinate real general, values at 17 significant digits.
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// max |a_ij - b_ij| / max |a_ij| over the union of both patterns.
double relative_difference(const SparseMatrix& a, const SparseMatrix& b);
bool same_pattern(const SparseMatrix& a, const SparseMatrix& b);
bool bit_identical(const SparseMatrix& a, const SparseMatrix& b);

/// Dense row-major copy, for tests on small matrices.
std::vector<double> to_dense(const SparseMatrix& m);

}  // namespace polydg
