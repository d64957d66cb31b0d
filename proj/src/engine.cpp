#include "polydg/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <numeric>
#include <ostream>

#include "polydg/parallel.hpp"

namespace polydg {

double* LocalContribution::add_block(int row_elem, int col_elem, int rows, int cols) {
  const std::size_t offset = matrix_.size();
  blocks_.push_back({row_elem, col_elem, rows, cols, offset});
  matrix_.resize(offset + static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
  return matrix_.data() + offset;
}

double* LocalContribution::add_load(int elem, int size) {
  const std::size_t offset = load_.size();
  loads_.push_back({elem, size, offset});
  load_.resize(offset + static_cast<std::size_t>(size), 0.0);
  return load_.data() + offset;
}

RowLayout RowLayout::all(const std::vector<std::int64_t>& offsets) {
  RowLayout layout;
  layout.offsets = offsets;
  layout.owned.resize(offsets.size() - 1);
  std::iota(layout.owned.begin(), layout.owned.end(), 0);
  return layout;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr int kMaxBlocks = 4;
constexpr int kMaxLoads = 2;

struct Segment {
  int row_elem = 0, col_elem = 0, rows = 0, cols = 0;
  std::size_t offset = 0;  // into the value store
};

// Per-item record of buffered contributions, consumed by the fixed-order reduction.
struct ItemRecord {
  std::array<Segment, kMaxBlocks> blocks;
  std::array<Segment, kMaxLoads> loads;
  std::uint8_t n_blocks = 0, n_loads = 0;
};

struct Layout {
  std::vector<std::int64_t> local_offset;  // per element, -1 when not owned
  std::int64_t n_rows = 0;
};

Layout make_layout(const RowLayout& rows) {
  Layout l;
  const std::size_t n_elem = rows.offsets.size() - 1;
  l.local_offset.assign(n_elem, -1);
  for (int e : rows.owned) {
    l.local_offset[e] = l.n_rows;
    l.n_rows += rows.offsets[e + 1] - rows.offsets[e];
  }
  return l;
}

// Position of the first entry of a contiguous column range in one CSR row.
std::int64_t locate(const SparseMatrix& m, std::int64_t row, std::int32_t col, int count) {
  const auto begin = m.col_idx.begin() + m.row_ptr[row];
  const auto end = m.col_idx.begin() + m.row_ptr[row + 1];
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col || end - it < count || *(it + (count - 1)) != col + count - 1)
    throw PatternMiss("pattern miss at row " + std::to_string(row) + ", column " + std::to_string(col));
  return it - m.col_idx.begin();
}

// Buckets buffered segments by row element in (group, item) order.
struct Buckets {
  std::vector<std::size_t> ptr;
  std::vector<std::pair<std::uint32_t, std::uint8_t>> entries;  // (item, segment)
};

template <class Select>
Buckets bucket_segments(const std::vector<ItemRecord>& records, std::size_t n_elem, Select select) {
  Buckets b;
  b.ptr.assign(n_elem + 1, 0);
  for (const auto& r : records) {
    const auto [segs, n] = select(r);
    for (int s = 0; s < n; ++s) ++b.ptr[segs[s].row_elem + 1];
  }
  for (std::size_t e = 0; e < n_elem; ++e) b.ptr[e + 1] += b.ptr[e];
  b.entries.resize(b.ptr[n_elem]);
  std::vector<std::size_t> fill(b.ptr.begin(), b.ptr.end() - 1);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto [segs, n] = select(records[i]);
    for (int s = 0; s < n; ++s)
      b.entries[fill[segs[s].row_elem]++] = {static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(s)};
  }
  return b;
}

}  // namespace

SparseMatrix build_pattern(const RowLayout& layout, const std::vector<std::vector<int>>& adjacency, int workers) {
  const Layout l = make_layout(layout);
  const auto& off = layout.offsets;
  SparseMatrix m;
  m.n_rows = l.n_rows;
  m.n_cols = layout.num_cols();
  m.row_ptr.assign(static_cast<std::size_t>(l.n_rows + 1), 0);
  std::vector<std::int64_t> row_len(layout.owned.size());
  for (std::size_t k = 0; k < layout.owned.size(); ++k) {
    std::int64_t len = 0;
    for (int c : adjacency[layout.owned[k]]) len += off[c + 1] - off[c];
    row_len[k] = len;
  }
  for (std::size_t k = 0; k < layout.owned.size(); ++k) {
    const int e = layout.owned[k];
    const std::int64_t r0 = l.local_offset[e];
    for (std::int64_t i = 0; i < off[e + 1] - off[e]; ++i) m.row_ptr[r0 + i + 1] = m.row_ptr[r0 + i] + row_len[k];
  }
  m.col_idx.resize(static_cast<std::size_t>(m.row_ptr.back()));
  m.values.assign(m.col_idx.size(), 0.0);
  parallel_for(layout.owned.size(), workers, [&](std::size_t b, std::size_t end, int) {
    for (std::size_t k = b; k < end; ++k) {
      const int e = layout.owned[k];
      const std::int64_t r0 = l.local_offset[e];
      for (std::int64_t i = 0; i < off[e + 1] - off[e]; ++i) {
        std::int64_t pos = m.row_ptr[r0 + i];
        for (int c : adjacency[e])
          for (std::int64_t j = off[c]; j < off[c + 1]; ++j) m.col_idx[pos++] = static_cast<std::int32_t>(j);
      }
    }
  });
  return m;
}

AssemblyResult run_assembly(const ContributionSource& source, const RowLayout& rows,
                            const std::vector<std::vector<int>>& adjacency, const EngineOptions& options) {
  const auto t_total = Clock::now();
  const auto& groups = source.groups();
  const Layout layout = make_layout(rows);
  const auto& off = rows.offsets;
  const std::size_t n_elem = off.size() - 1;
  const std::int64_t n_cols = rows.num_cols();
  if (n_cols >= std::numeric_limits<std::int32_t>::max() || layout.n_rows >= std::numeric_limits<std::int32_t>::max())
    throw std::invalid_argument("run_assembly: problem too large for 32-bit indices");
  const int workers = std::max(1, options.workers);
  const bool triplets = options.approach == Approach::TripletSort;
  const bool atomic = !triplets && options.accumulation == Accumulation::Atomic;
  const bool buffered = !triplets && !atomic;

  AssemblyResult result;
  AssemblyStats& stats = result.stats;

  // Storage bases per group.
  std::vector<std::size_t> item_base(groups.size() + 1, 0), slot_base(groups.size() + 1, 0),
      load_base(groups.size() + 1, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::size_t n = groups[g].items.size();
    item_base[g + 1] = item_base[g] + n;
    slot_base[g + 1] = slot_base[g] + n * static_cast<std::size_t>(groups[g].slots);
    load_base[g + 1] = load_base[g] + n * static_cast<std::size_t>(groups[g].load_slots);
  }
  const std::size_t n_items = item_base.back();
  if (n_items > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("run_assembly: too many work items");

  TripletStream stream;
  SparseMatrix pattern;
  std::vector<double> value_store;
  if (triplets) {
    stream.allocate(slot_base.back(), static_cast<std::int32_t>(layout.n_rows));
    for (std::size_t g = 0; g < groups.size(); ++g)
      stream.groups.push_back({slot_base[g], groups[g].items.size(), static_cast<std::size_t>(groups[g].slots)});
    stats.triplet_slots = stream.size();
  } else {
    const auto t_index = Clock::now();
    pattern = build_pattern(rows, adjacency, workers);
    stats.index_seconds = seconds_since(t_index);
    if (buffered) value_store.assign(slot_base.back(), 0.0);
  }
  std::vector<double> load_store(load_base.back(), 0.0);
  std::vector<ItemRecord> records(n_items);
  std::vector<LocalContribution> scratch(static_cast<std::size_t>(workers));

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const WorkGroup& group = groups[g];
    const std::size_t n = group.items.size();
    const StripeGroup stripe{slot_base[g], n, static_cast<std::size_t>(group.slots)};
    std::vector<std::size_t> written(static_cast<std::size_t>(workers), 0);
    const auto t_kernel = Clock::now();
    parallel_for(n, workers, [&](std::size_t begin, std::size_t end, int worker) {
      LocalContribution& lc = scratch[worker];
      for (std::size_t k = begin; k < end; ++k) {
        lc.reset();
        source.compute(g, k, lc);
        ItemRecord& rec = records[item_base[g] + k];

        if (lc.loads().size() > kMaxLoads) throw std::logic_error("work item produced too many load segments");
        std::size_t lpos = load_base[g] + k * static_cast<std::size_t>(group.load_slots);
        const std::size_t lend = lpos + static_cast<std::size_t>(group.load_slots);
        for (const auto& ld : lc.loads()) {
          if (layout.local_offset[ld.elem] < 0) continue;
          if (lpos + static_cast<std::size_t>(ld.size) > lend) throw std::logic_error("load stripe overflow");
          std::copy_n(lc.load_data(ld), ld.size, load_store.begin() + static_cast<std::ptrdiff_t>(lpos));
          rec.loads[rec.n_loads++] = {ld.elem, 0, ld.size, 1, lpos};
          lpos += static_cast<std::size_t>(ld.size);
        }

        if (lc.blocks().size() > kMaxBlocks) throw std::logic_error("work item produced too many blocks");
        std::size_t slot = 0;
        std::size_t vpos = slot_base[g] + k * static_cast<std::size_t>(group.slots);
        for (const auto& blk : lc.blocks()) {
          const std::int64_t r0 = layout.local_offset[blk.row_elem];
          if (r0 < 0) continue;
          const std::size_t count = static_cast<std::size_t>(blk.rows) * static_cast<std::size_t>(blk.cols);
          if (slot + count > static_cast<std::size_t>(group.slots)) throw std::logic_error("stripe overflow");
          const double* v = lc.block_data(blk);
          const std::int64_t c0 = off[blk.col_elem];
          if (triplets) {
            for (int i = 0; i < blk.rows; ++i)
              for (int j = 0; j < blk.cols; ++j) {
                const std::size_t addr = stripe.address(k, slot++);
                stream.rows[addr] = static_cast<std::int32_t>(r0 + i);
                stream.cols[addr] = static_cast<std::int32_t>(c0 + j);
                stream.vals[addr] = v[i * blk.cols + j];
              }
          } else if (atomic) {
            for (int i = 0; i < blk.rows; ++i) {
              const std::int64_t pos = locate(pattern, r0 + i, static_cast<std::int32_t>(c0), blk.cols);
              for (int j = 0; j < blk.cols; ++j)
                std::atomic_ref<double>(pattern.values[pos + j]).fetch_add(v[i * blk.cols + j], std::memory_order_relaxed);
            }
            slot += count;
          } else {
            std::copy_n(v, count, value_store.begin() + static_cast<std::ptrdiff_t>(vpos));
            rec.blocks[rec.n_blocks++] = {blk.row_elem, blk.col_elem, blk.rows, blk.cols, vpos};
            vpos += count;
            slot += count;
          }
        }
        written[worker] += slot;
      }
    });
    const double secs = seconds_since(t_kernel);
    const std::size_t nnz_written = std::accumulate(written.begin(), written.end(), std::size_t{0});
    auto it = std::find_if(stats.kernels.begin(), stats.kernels.end(),
                           [&](const KernelTiming& kt) { return kt.kernel == group.kernel; });
    if (it == stats.kernels.end()) {
      stats.kernels.push_back({group.kernel, 0, 0.0, 0});
      it = stats.kernels.end() - 1;
    }
    it->work_items += n;
    it->seconds += secs;
    it->nnz_written += nnz_written;
  }

  if (triplets) {
    const auto t_index = Clock::now();
    TripletMergeStats ms;
    result.matrix = triplets_to_csr(stream, layout.n_rows, n_cols, workers, &ms);
    stats.index_seconds = seconds_since(t_index);
    stats.triplets = ms.valid_triplets;
  } else {
    result.matrix = std::move(pattern);
  }

  // Fixed-order reductions: buffered matrix blocks (deterministic Approach 2)
  // and the load vector for every approach.
  const auto t_reduce = Clock::now();
  if (buffered) {
    const Buckets b = bucket_segments(records, n_elem, [](const ItemRecord& r) {
      return std::pair<const Segment*, int>{r.blocks.data(), r.n_blocks};
    });
    SparseMatrix& m = result.matrix;
    parallel_for(rows.owned.size(), workers, [&](std::size_t begin, std::size_t end, int) {
      for (std::size_t k = begin; k < end; ++k) {
        const int e = rows.owned[k];
        const std::int64_t r0 = layout.local_offset[e];
        for (std::size_t q = b.ptr[e]; q < b.ptr[e + 1]; ++q) {
          const Segment& s = records[b.entries[q].first].blocks[b.entries[q].second];
          const std::int64_t c0 = off[s.col_elem];
          const double* v = value_store.data() + s.offset;
          for (int i = 0; i < s.rows; ++i) {
            const std::int64_t pos = locate(m, r0 + i, static_cast<std::int32_t>(c0), s.cols);
            for (int j = 0; j < s.cols; ++j) m.values[pos + j] += v[i * s.cols + j];
          }
        }
      }
    });
  }
  result.load.assign(static_cast<std::size_t>(layout.n_rows), 0.0);
  {
    const Buckets b = bucket_segments(records, n_elem, [](const ItemRecord& r) {
      return std::pair<const Segment*, int>{r.loads.data(), r.n_loads};
    });
    parallel_for(rows.owned.size(), workers, [&](std::size_t begin, std::size_t end, int) {
      for (std::size_t k = begin; k < end; ++k) {
        const int e = rows.owned[k];
        const std::int64_t r0 = layout.local_offset[e];
        for (std::size_t q = b.ptr[e]; q < b.ptr[e + 1]; ++q) {
          const Segment& s = records[b.entries[q].first].loads[b.entries[q].second];
          for (int i = 0; i < s.rows; ++i) result.load[r0 + i] += load_store[s.offset + i];
        }
      }
    });
  }
  stats.reduce_seconds = seconds_since(t_reduce);

  result.row_offsets.resize(rows.owned.size());
  for (std::size_t k = 0; k < rows.owned.size(); ++k) result.row_offsets[k] = layout.local_offset[rows.owned[k]];
  stats.nnz = result.matrix.nnz();
  stats.total_seconds = seconds_since(t_total);
  return result;
}

void write_stats_csv(std::ostream& out, const AssemblyStats& stats) {
  out << "kernel,work_items,seconds,nnz_written\n";
  std::size_t items = 0, written = 0;
  for (const auto& k : stats.kernels) {
    out << k.kernel << ',' << k.work_items << ',' << k.seconds << ',' << k.nnz_written << '\n';
    items += k.work_items;
    written += k.nnz_written;
  }
  out << "indices,0," << stats.index_seconds << ',' << stats.nnz << '\n';
  out << "reduce,0," << stats.reduce_seconds << ",0\n";
  out << "total," << items << ',' << stats.total_seconds << ',' << written << '\n';
}

}  // namespace polydg
