#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "polydg/sparse.hpp"

namespace polydg {

/// Approach 1 streams triplets and sorts; Approach 2 precomputes the block
/// pattern and accumulates into it.
enum class Approach { TripletSort = 1, Pattern = 2 };
enum class Accumulation { Atomic, Deterministic };

/// One kernel launch: work items of one kind and one polynomial degree.
struct WorkGroup {
  std::string kernel;
  int degree = 0;
  std::vector<int> items;  // kernel-specific ids (cells, sub-faces)
  int slots = 0;           // matrix entries one item may write
  int load_slots = 0;      // load entries one item may write
};

/// Dense output of one work item: up to four element blocks and two load
/// segments. Blocks are row-major with test functions along rows.
class LocalContribution {
 public:
  struct Block {
    int row_elem, col_elem, rows, cols;
    std::size_t offset;
  };
  struct Load {
    int elem, size;
    std::size_t offset;
  };

  void reset() {
    blocks_.clear();
    loads_.clear();
    matrix_.clear();
    load_.clear();
  }
  /// Zero-initialised block storage. The pointer stays valid until the
  /// next add_block (add_load) call; use block(k) after adding several.
  double* add_block(int row_elem, int col_elem, int rows, int cols);
  double* add_load(int elem, int size);
  double* block(std::size_t k) { return matrix_.data() + blocks_[k].offset; }

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Load>& loads() const { return loads_; }
  const double* block_data(const Block& b) const { return matrix_.data() + b.offset; }
  const double* load_data(const Load& l) const { return load_.data() + l.offset; }

 private:
  std::vector<Block> blocks_;
  std::vector<Load> loads_;
  std::vector<double> matrix_;
  std::vector<double> load_;
};

/// Produces the work groups and the contribution of each work item. Must be
/// safe to call concurrently from several threads.
class ContributionSource {
 public:
  virtual ~ContributionSource() = default;
  virtual const std::vector<WorkGroup>& groups() const = 0;
  virtual void compute(std::size_t group, std::size_t item, LocalContribution& out) const = 0;
};

/// Global DoF layout and the rows this assembly produces. `owned` lists the
/// elements whose rows are kept (ascending); rows are renumbered
/// consecutively in that order. Columns stay global.
struct RowLayout {
  std::vector<std::int64_t> offsets;
  std::vector<int> owned;

  static RowLayout all(const std::vector<std::int64_t>& offsets);
  std::int64_t num_cols() const { return offsets.back(); }
};

struct EngineOptions {
  Approach approach = Approach::Pattern;
  Accumulation accumulation = Accumulation::Deterministic;
  int workers = 1;
};

struct KernelTiming {
  std::string kernel;
  std::size_t work_items = 0;
  double seconds = 0.0;
  std::size_t nnz_written = 0;
};

struct AssemblyStats {
  std::vector<KernelTiming> kernels;  // one row per kernel name, in launch order
  double index_seconds = 0.0;         // Approach 1: sort + merge; Approach 2: pattern construction
  double reduce_seconds = 0.0;        // fixed-order reduction of buffered contributions
  double total_seconds = 0.0;
  std::size_t triplet_slots = 0;  // Approach 1 stream length
  std::size_t triplets = 0;       // non-sentinel triplets (Approach 1)
  std::size_t nnz = 0;

  double duplicate_ratio() const { return nnz ? static_cast<double>(triplets) / static_cast<double>(nnz) : 0.0; }
};

struct AssemblyResult {
  SparseMatrix matrix;
  std::vector<double> load;
  std::vector<std::int64_t> row_offsets;  // local row offset per owned element
  AssemblyStats stats;
};

class PatternMiss : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// CSR skeleton of the block pattern for the owned rows: for owned element e,
/// rows offsets[e]..offsets[e+1]-1 hold the full column ranges of every
/// element in adjacency[e]. Values are zero.
SparseMatrix build_pattern(const RowLayout& layout, const std::vector<std::vector<int>>& adjacency, int workers);

/// Runs every work group and produces the matrix and load vector.
AssemblyResult run_assembly(const ContributionSource& source, const RowLayout& layout,
                            const std::vector<std::vector<int>>& adjacency, const EngineOptions& options);

/// Writes one CSV row per kernel plus `indices`, `reduce` and `total` rows:
/// header `kernel,work_items,seconds,nnz_written`.
void write_stats_csv(std::ostream& out, const AssemblyStats& stats);

}  // namespace polydg
