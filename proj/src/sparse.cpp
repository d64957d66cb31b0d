#include "polydg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "polydg/parallel.hpp"

namespace polydg {

double SparseMatrix::at(std::int64_t r, std::int64_t c) const {
  const auto begin = col_idx.begin() + row_ptr[r];
  const auto end = col_idx.begin() + row_ptr[r + 1];
  const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(c));
  if (it == end || *it != c) return 0.0;
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::int64_t r = 0; r < n_rows; ++r) {
    double s = 0.0;
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += values[k] * x[col_idx[k]];
    y[r] = s;
  }
}

void SparseMatrix::validate() const {
  if (row_ptr.size() != static_cast<std::size_t>(n_rows + 1) || row_ptr.front() != 0)
    throw std::logic_error("CSR: row_ptr has the wrong size or start");
  if (row_ptr.back() != static_cast<std::int64_t>(col_idx.size()) || col_idx.size() != values.size())
    throw std::logic_error("CSR: array lengths disagree");
  for (std::int64_t r = 0; r < n_rows; ++r) {
    if (row_ptr[r + 1] < row_ptr[r]) throw std::logic_error("CSR: row_ptr decreasing");
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col_idx[k] < 0 || col_idx[k] >= n_cols) throw std::logic_error("CSR: column out of range");
      if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1]) throw std::logic_error("CSR: columns not increasing");
    }
  }
}

void TripletStream::allocate(std::size_t n, std::int32_t sentinel) {
  sentinel_row = sentinel;
  rows.assign(n, sentinel);
  cols.assign(n, 0);
  vals.assign(n, 0.0);
}

namespace {

struct Entry {
  std::int64_t key;
  double val;
};

bool key_less(const Entry& a, const Entry& b) { return a.key < b.key; }

struct Chunks {
  std::size_t n, count;
  std::size_t begin(std::size_t c) const { return n * c / count; }
  std::size_t end(std::size_t c) const { return n * (c + 1) / count; }
};

void parallel_stable_sort(std::vector<Entry>& entries, int workers) {
  const std::size_t n = entries.size();
  std::size_t pieces = 1;
  while (pieces < static_cast<std::size_t>(workers) * 2 && pieces * 4096 < n) pieces *= 2;
  const Chunks chunks{n, pieces};
  parallel_for(
      pieces, workers,
      [&](std::size_t b, std::size_t e, int) {
        for (std::size_t c = b; c < e; ++c)
          std::stable_sort(entries.begin() + chunks.begin(c), entries.begin() + chunks.end(c), key_less);
      },
      1);
  std::vector<Entry> scratch(n);
  for (std::size_t width = 1; width < pieces; width *= 2) {
    const std::size_t merges = pieces / (2 * width);
    parallel_for(
        merges, workers,
        [&](std::size_t b, std::size_t e, int) {
          for (std::size_t m = b; m < e; ++m) {
            const std::size_t lo = chunks.begin(2 * width * m);
            const std::size_t mid = chunks.begin(2 * width * m + width);
            const std::size_t hi = chunks.end(2 * width * m + 2 * width - 1);
            std::merge(entries.begin() + lo, entries.begin() + mid, entries.begin() + mid, entries.begin() + hi,
                       scratch.begin() + lo, key_less);
          }
        },
        1);
    entries.swap(scratch);
  }
}

}  // namespace

SparseMatrix triplets_to_csr(const TripletStream& stream, std::int64_t n_rows, std::int64_t n_cols, int workers,
                             TripletMergeStats* stats) {
  if (n_cols > std::numeric_limits<std::int32_t>::max())
    throw std::invalid_argument("triplets_to_csr: too many columns for 32-bit indices");
  const std::size_t total = stream.size();
  const std::size_t pieces = std::max<std::size_t>(1, std::min<std::size_t>(total / 4096 + 1, 64));
  const Chunks chunks{total, pieces};

  // Compact away the sentinel slots, preserving stream order.
  std::vector<std::size_t> count(pieces + 1, 0);
  parallel_for(
      pieces, workers,
      [&](std::size_t b, std::size_t e, int) {
        for (std::size_t c = b; c < e; ++c) {
          std::size_t k = 0;
          for (std::size_t i = chunks.begin(c); i < chunks.end(c); ++i) {
            const std::int32_t r = stream.rows[i];
            if (r == stream.sentinel_row) continue;
            if (r < 0 || r >= n_rows || stream.cols[i] < 0 || stream.cols[i] >= n_cols)
              throw std::out_of_range("triplets_to_csr: entry outside the matrix");
            ++k;
          }
          count[c + 1] = k;
        }
      },
      1);
  for (std::size_t c = 0; c < pieces; ++c) count[c + 1] += count[c];
  std::vector<Entry> entries(count[pieces]);
  parallel_for(
      pieces, workers,
      [&](std::size_t b, std::size_t e, int) {
        for (std::size_t c = b; c < e; ++c) {
          std::size_t k = count[c];
          for (std::size_t i = chunks.begin(c); i < chunks.end(c); ++i) {
            if (stream.rows[i] == stream.sentinel_row) continue;
            entries[k++] = {static_cast<std::int64_t>(stream.rows[i]) * n_cols + stream.cols[i], stream.vals[i]};
          }
        }
      },
      1);

  parallel_stable_sort(entries, workers);

  // Merge runs of equal keys. Chunk boundaries are moved to key changes so
  // each run is summed by one worker, left to right.
  const std::size_t n = entries.size();
  std::vector<std::size_t> cut(pieces + 1, n);
  cut[0] = 0;
  for (std::size_t c = 1; c < pieces; ++c) {
    std::size_t i = std::min(n, std::max(cut[c - 1], chunks.begin(c)));
    while (i < n && i > 0 && entries[i].key == entries[i - 1].key) ++i;
    cut[c] = std::max(i, cut[c - 1]);
  }
  std::vector<std::size_t> unique_count(pieces + 1, 0);
  parallel_for(
      pieces, workers,
      [&](std::size_t b, std::size_t e, int) {
        for (std::size_t c = b; c < e; ++c) {
          std::size_t u = 0;
          for (std::size_t i = cut[c]; i < cut[c + 1]; ++i)
            if (i == cut[c] || entries[i].key != entries[i - 1].key) ++u;
          unique_count[c + 1] = u;
        }
      },
      1);
  for (std::size_t c = 0; c < pieces; ++c) unique_count[c + 1] += unique_count[c];
  const std::size_t nnz = unique_count[pieces];

  SparseMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_ptr.assign(static_cast<std::size_t>(n_rows + 1), 0);
  m.col_idx.resize(nnz);
  m.values.resize(nnz);
  std::vector<std::int64_t> unique_row(nnz);
  parallel_for(
      pieces, workers,
      [&](std::size_t b, std::size_t e, int) {
        for (std::size_t c = b; c < e; ++c) {
          std::size_t u = unique_count[c];
          for (std::size_t i = cut[c]; i < cut[c + 1]; ++i) {
            if (i == cut[c] || entries[i].key != entries[i - 1].key) {
              m.col_idx[u] = static_cast<std::int32_t>(entries[i].key % n_cols);
              m.values[u] = entries[i].val;
              unique_row[u] = entries[i].key / n_cols;
              ++u;
            } else {
              m.values[u - 1] += entries[i].val;
            }
          }
        }
      },
      1);
  // row_ptr[r] = first unique entry with row >= r; every r is written once.
  parallel_for(nnz + 1, workers, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t u = b; u < e; ++u) {
      const std::int64_t prev = u == 0 ? -1 : unique_row[u - 1];
      const std::int64_t row = u == nnz ? n_rows : unique_row[u];
      for (std::int64_t r = prev + 1; r <= row; ++r) m.row_ptr[r] = static_cast<std::int64_t>(u);
    }
  });
  if (stats) {
    stats->valid_triplets = n;
    stats->nnz = nnz;
  }
  return m;
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.n_rows << ' ' << m.n_cols << ' ' << m.nnz() << '\n';
  char buf[64];
  for (std::int64_t r = 0; r < m.n_rows; ++r)
    for (std::int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", m.values[k]);
      out << r + 1 << ' ' << m.col_idx[k] + 1 << ' ' << buf << '\n';
    }
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0)
    throw std::runtime_error(path.string() + ": expected a real general coordinate Matrix Market header");
  while (std::getline(in, line) && (line.empty() || line[0] == '%')) {
  }
  std::int64_t rows = 0, cols = 0, nnz = 0;
  if (!(std::istringstream(line) >> rows >> cols >> nnz)) throw std::runtime_error(path.string() + ": bad size line");
  TripletStream t;
  t.allocate(static_cast<std::size_t>(nnz), static_cast<std::int32_t>(rows));
  for (std::int64_t k = 0; k < nnz; ++k) {
    std::int64_t r = 0, c = 0;
    double v = 0.0;
    if (!(in >> r >> c >> v)) throw std::runtime_error(path.string() + ": truncated entry list");
    t.rows[k] = static_cast<std::int32_t>(r - 1);
    t.cols[k] = static_cast<std::int32_t>(c - 1);
    t.vals[k] = v;
  }
  return triplets_to_csr(t, rows, cols, 1);
}

namespace {

template <class F>
void for_union(const SparseMatrix& a, const SparseMatrix& b, F&& visit) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols) throw std::invalid_argument("matrix shapes differ");
  for (std::int64_t r = 0; r < a.n_rows; ++r) {
    std::int64_t i = a.row_ptr[r], j = b.row_ptr[r];
    const std::int64_t ie = a.row_ptr[r + 1], je = b.row_ptr[r + 1];
    while (i < ie || j < je) {
      if (j >= je || (i < ie && a.col_idx[i] < b.col_idx[j])) {
        visit(a.values[i], 0.0, true, false);
        ++i;
      } else if (i >= ie || b.col_idx[j] < a.col_idx[i]) {
        visit(0.0, b.values[j], false, true);
        ++j;
      } else {
        visit(a.values[i], b.values[j], true, true);
        ++i;
        ++j;
      }
    }
  }
}

}  // namespace

double relative_difference(const SparseMatrix& a, const SparseMatrix& b) {
  double diff = 0.0, scale = 0.0;
  for_union(a, b, [&](double x, double y, bool, bool) {
    diff = std::max(diff, std::abs(x - y));
    scale = std::max(scale, std::abs(x));
  });
  if (scale == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / scale;
}

bool same_pattern(const SparseMatrix& a, const SparseMatrix& b) {
  return a.n_rows == b.n_rows && a.n_cols == b.n_cols && a.row_ptr == b.row_ptr && a.col_idx == b.col_idx;
}

bool bit_identical(const SparseMatrix& a, const SparseMatrix& b) {
  if (!same_pattern(a, b)) return false;
  return a.values.empty() || std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0;
}

std::vector<double> to_dense(const SparseMatrix& m) {
  std::vector<double> d(static_cast<std::size_t>(m.n_rows * m.n_cols), 0.0);
  for (std::int64_t r = 0; r < m.n_rows; ++r)
    for (std::int64_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) d[r * m.n_cols + m.col_idx[k]] = m.values[k];
  return d;
}

}  // namespace polydg
