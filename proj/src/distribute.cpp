#include "polydg/distribute.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "polydg/parallel.hpp"
#include "polydg/quadrature.hpp"

namespace polydg {

Partition Partition::from_map(std::vector<int> part, int n_parts, const Discretization& disc,
                              std::span<const double> element_weights) {
  if (part.size() != disc.num_elements()) throw std::invalid_argument("partition map size differs from element count");
  Partition p;
  p.n_parts = n_parts;
  p.part = std::move(part);
  p.owned.assign(n_parts, {});
  p.weights.assign(n_parts, 0.0);
  for (std::size_t e = 0; e < p.part.size(); ++e) {
    const int k = p.part[e];
    if (k < 0 || k >= n_parts) throw std::invalid_argument("partition map entry out of range at element " + std::to_string(e));
    p.owned[k].push_back(static_cast<int>(e));
    p.weights[k] += element_weights.empty() ? 1.0 : element_weights[e];
  }
  for (std::size_t i = 0; i < disc.interfaces.size(); ++i)
    if (p.part[disc.interfaces[i][0]] != p.part[disc.interfaces[i][1]]) p.cut_interfaces.push_back(static_cast<int>(i));
  return p;
}

void Partition::validate(const Discretization& disc) const {
  if (part.size() != disc.num_elements()) throw std::invalid_argument("partition does not cover every element");
  for (int k = 0; k < n_parts; ++k)
    if (owned[k].empty()) throw std::invalid_argument("part " + std::to_string(k) + " is empty");
  std::size_t cuts = 0;
  for (std::size_t i = 0; i < disc.interfaces.size(); ++i) {
    const bool cut = part[disc.interfaces[i][0]] != part[disc.interfaces[i][1]];
    const bool listed = std::binary_search(cut_interfaces.begin(), cut_interfaces.end(), static_cast<int>(i));
    if (cut != listed) throw std::invalid_argument("cut set inconsistent at interface " + std::to_string(i));
    cuts += cut;
  }
  if (cuts != cut_interfaces.size()) throw std::invalid_argument("cut set lists unknown interfaces");
}

double Partition::imbalance() const {
  if (weights.empty()) return 0.0;
  const double mean = std::accumulate(weights.begin(), weights.end(), 0.0) / static_cast<double>(weights.size());
  double worst = 0.0;
  for (double w : weights) worst = std::max(worst, std::abs(w - mean));
  return mean > 0.0 ? worst / mean : 0.0;
}

std::vector<double> quadrature_cost_weights(const Discretization& disc, int quadrature_increment) {
  std::vector<double> w(disc.num_elements());
  for (std::size_t e = 0; e < disc.num_elements(); ++e) {
    const ElementData& ed = disc.elements[e];
    const int order = kernel_order(ed.basis.degree(), quadrature_increment);
    double points = 0.0;
    for (int c = ed.cell_begin; c < ed.cell_end; ++c) {
      const Cell& cell = disc.cells[c];
      points += static_cast<double>(cell_rule(cell.simplex_dim, cell.is_prism(), order).size());
    }
    const double n = static_cast<double>(ed.basis.size());
    w[e] = points * n * n;
  }
  return w;
}

namespace {

class Bisector {
 public:
  Bisector(const Discretization& disc, std::span<const double> weights, const PartitionOptions& options)
      : weights_(weights.begin(), weights.end()), options_(options), rng_(options.seed) {
    const std::size_t n = disc.num_elements();
    if (weights_.empty()) weights_.assign(n, 1.0);
    adj_.resize(n);
    for (const auto& it : disc.interfaces) {
      adj_[it[0]].push_back(it[1]);
      adj_[it[1]].push_back(it[0]);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
    side_.assign(n, -1);
    part_.assign(n, -1);
  }

  std::vector<int> run(int n_parts) {
    std::vector<int> all(adj_.size());
    std::iota(all.begin(), all.end(), 0);
    split(all, n_parts, 0);
    return part_;
  }

 private:
  // Region tag: 0 = A, 1 = B, -1 outside the current subset.
  void split(const std::vector<int>& set, int k, int first) {
    if (k == 1) {
      for (int v : set) part_[v] = first;
      return;
    }
    const int k1 = k / 2;
    double total = 0.0;
    for (int v : set) total += weights_[v];
    const double target = total * k1 / k;

    for (int v : set) side_[v] = 1;
    grow(set, target, k1, static_cast<int>(set.size()) - (k - k1));
    refine(set, target);

    std::vector<int> a, b;
    for (int v : set) (side_[v] == 0 ? a : b).push_back(v);
    for (int v : set) side_[v] = -1;
    split(a, k1, first);
    split(b, k - k1, first + k1);
  }

  int farthest(int start) {
    std::vector<int> dist(adj_.size(), -1);
    std::vector<int> queue{start};
    dist[start] = 0;
    int best = start;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int v = queue[h];
      if (dist[v] > dist[best] || (dist[v] == dist[best] && v < best)) best = v;
      for (int u : adj_[v])
        if (side_[u] >= 0 && dist[u] < 0) {
          dist[u] = dist[v] + 1;
          queue.push_back(u);
        }
    }
    return best;
  }

  // Greedy graph growing: the frontier vertex with the most edges into A
  // (minus edges out of it) joins next.
  void grow(const std::vector<int>& set, double target, int min_count, int max_count) {
    std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
    const int seed = farthest(farthest(set[pick(rng_)]));
    std::vector<int> gain(adj_.size(), 0);
    std::set<std::pair<int, int>> frontier;  // (-gain, vertex)
    std::vector<bool> queued(adj_.size(), false);
    double wa = 0.0;
    int count = 0;
    auto add = [&](int v) {
      if (queued[v]) frontier.erase({-gain[v], v});
      side_[v] = 0;
      wa += weights_[v];
      ++count;
      for (int u : adj_[v]) {
        if (side_[u] != 1) continue;
        if (queued[u]) frontier.erase({-gain[u], u});
        else {
          queued[u] = true;
          gain[u] = -static_cast<int>(std::count_if(adj_[u].begin(), adj_[u].end(), [&](int x) { return side_[x] >= 0; }));
        }
        gain[u] += 2;
        frontier.insert({-gain[u], u});
      }
    };
    add(seed);
    std::size_t next_unassigned = 0;
    while (count < max_count) {
      int v = -1;
      if (!frontier.empty()) {
        v = frontier.begin()->second;
      } else {
        while (side_[set[next_unassigned]] != 1) ++next_unassigned;
        v = set[next_unassigned];
      }
      if (count >= min_count) {
        if (wa >= target) break;
        if (wa + weights_[v] - target > target - wa) break;
      }
      add(v);
    }
  }

  int move_gain(int v) const {
    int g = 0;
    for (int u : adj_[v])
      if (side_[u] >= 0) g += side_[u] != side_[v] ? 1 : -1;
    return g;
  }

  // Local improvement of the cut: single moves, then pair swaps, each
  // accepted only when it lowers the cut and keeps the balance.
  void refine(const std::vector<int>& set, double target) {
    double wa = 0.0;
    int na = 0;
    for (int v : set)
      if (side_[v] == 0) {
        wa += weights_[v];
        ++na;
      }
    const int nb = static_cast<int>(set.size()) - na;
    int counts[2] = {na, nb};
    const double slack = options_.balance_tolerance * target;
    auto acceptable = [&](double new_wa) {
      return std::abs(new_wa - target) <= std::max(std::abs(wa - target), slack);
    };
    const std::size_t max_moves = set.size() * static_cast<std::size_t>(std::max(1, options_.refinement_passes));
    for (std::size_t moves = 0; moves < max_moves; ++moves) {
      std::vector<std::pair<int, int>> cand[2];  // (-gain, v) for boundary vertices
      for (int v : set) {
        const int g = move_gain(v);
        bool boundary = false;
        for (int u : adj_[v]) boundary |= side_[u] >= 0 && side_[u] != side_[v];
        if (boundary) cand[side_[v]].push_back({-g, v});
      }
      for (auto& c : cand) std::sort(c.begin(), c.end());
      int best_v = -1, best_g = 0;
      for (int s = 0; s < 2; ++s)
        for (const auto& [ng, v] : cand[s]) {
          if (-ng <= best_g) break;
          if (counts[s] <= 1) break;
          const double nw = s == 0 ? wa - weights_[v] : wa + weights_[v];
          if (acceptable(nw)) {
            best_v = v;
            best_g = -ng;
            break;
          }
        }
      if (best_v >= 0) {
        const int s = side_[best_v];
        wa += s == 0 ? -weights_[best_v] : weights_[best_v];
        --counts[s];
        ++counts[1 - s];
        side_[best_v] = 1 - s;
        continue;
      }
      constexpr std::size_t kTop = 16;
      int pa = -1, pb = -1;
      for (std::size_t i = 0; i < std::min(kTop, cand[0].size()); ++i)
        for (std::size_t j = 0; j < std::min(kTop, cand[1].size()); ++j) {
          const int a = cand[0][i].second, b = cand[1][j].second;
          const bool linked = std::binary_search(adj_[a].begin(), adj_[a].end(), b);
          const int g = -cand[0][i].first - cand[1][j].first - (linked ? 2 : 0);
          if (g > best_g && acceptable(wa - weights_[a] + weights_[b])) {
            best_g = g;
            pa = a;
            pb = b;
          }
        }
      if (pa < 0) break;
      wa += weights_[pb] - weights_[pa];
      side_[pa] = 1;
      side_[pb] = 0;
    }
  }

  std::vector<double> weights_;
  PartitionOptions options_;
  std::mt19937_64 rng_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> side_;
  std::vector<int> part_;
};

}  // namespace

Partition partition_mesh(const Discretization& disc, int n_parts, std::span<const double> element_weights,
                         const PartitionOptions& options) {
  if (n_parts < 1) throw std::invalid_argument("n_parts must be at least 1");
  if (static_cast<std::size_t>(n_parts) > disc.num_elements())
    throw std::invalid_argument("n_parts (" + std::to_string(n_parts) + ") exceeds the element count (" +
                                std::to_string(disc.num_elements()) + ")");
  if (!element_weights.empty() && element_weights.size() != disc.num_elements())
    throw std::invalid_argument("one weight per element expected");
  Bisector bisector(disc, element_weights, options);
  Partition p = Partition::from_map(bisector.run(n_parts), n_parts, disc, element_weights);
  p.validate(disc);
  return p;
}

PartialMatrix assemble_partition(const Discretization& disc, const PdeCoefficients& coeffs,
                                 const AssemblyConfig& config, const FaceSetup& setup, const Partition& partition,
                                 int part_id) {
  if (part_id < 0 || part_id >= partition.n_parts) throw std::invalid_argument("part id out of range");
  const std::vector<int>& owned = partition.owned[part_id];
  AssemblyConfig cfg = config;
  cfg.approach = Approach::Pattern;
  const DgSource source(disc, coeffs, cfg, setup, owned);
  RowLayout layout{disc.offsets, owned};
  AssemblyResult r = run_assembly(source, layout, block_adjacency(disc), cfg.engine());

  PartialMatrix out;
  out.part = part_id;
  for (int e : owned) {
    const std::int64_t b = disc.offsets[e], end = disc.offsets[e + 1];
    if (!out.row_ranges.empty() && out.row_ranges.back().second == b) out.row_ranges.back().second = end;
    else out.row_ranges.push_back({b, end});
  }
  out.matrix = std::move(r.matrix);
  out.load = std::move(r.load);
  out.stats = std::move(r.stats);
  return out;
}

std::vector<PartialMatrix> assemble_partitions(const Discretization& disc, const PdeCoefficients& coeffs,
                                               const AssemblyConfig& config, const Partition& partition,
                                               int concurrent_parts) {
  const FaceSetup setup = prepare_faces(disc, coeffs, config);
  std::vector<PartialMatrix> out(partition.n_parts);
  parallel_for(
      out.size(), concurrent_parts,
      [&](std::size_t b, std::size_t e, int) {
        for (std::size_t k = b; k < e; ++k)
          out[k] = assemble_partition(disc, coeffs, config, setup, partition, static_cast<int>(k));
      },
      1);
  return out;
}

SparseMatrix gather_and_verify(std::span<const PartialMatrix> partials, std::int64_t n_rows, std::vector<double>* load) {
  struct Range {
    std::int64_t begin, end, local;
    std::size_t partial;
  };
  std::vector<Range> ranges;
  std::int64_t n_cols = -1;
  for (std::size_t k = 0; k < partials.size(); ++k) {
    const PartialMatrix& p = partials[k];
    std::int64_t local = 0;
    for (const auto& [b, e] : p.row_ranges) {
      ranges.push_back({b, e, local, k});
      local += e - b;
    }
    if (local != p.matrix.n_rows) throw std::invalid_argument("partial " + std::to_string(p.part) + ": row ranges do not match its rows");
    if (n_cols >= 0 && p.matrix.n_cols != n_cols) throw std::invalid_argument("partials disagree on the column count");
    n_cols = p.matrix.n_cols;
  }
  std::sort(ranges.begin(), ranges.end(), [](const Range& a, const Range& b) { return a.begin < b.begin; });
  std::int64_t cursor = 0;
  for (const Range& r : ranges) {
    if (r.begin > cursor) throw std::invalid_argument("rows " + std::to_string(cursor) + ".." + std::to_string(r.begin - 1) + " are not covered");
    if (r.begin < cursor) throw std::invalid_argument("row " + std::to_string(r.begin) + " is covered twice");
    cursor = r.end;
  }
  if (cursor != n_rows) throw std::invalid_argument("rows from " + std::to_string(cursor) + " on are not covered");

  SparseMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols < 0 ? n_rows : n_cols;
  m.row_ptr.assign(static_cast<std::size_t>(n_rows) + 1, 0);
  if (load) load->assign(static_cast<std::size_t>(n_rows), 0.0);
  for (const Range& r : ranges) {
    const SparseMatrix& p = partials[r.partial].matrix;
    for (std::int64_t i = 0; i < r.end - r.begin; ++i)
      m.row_ptr[r.begin + i + 1] = p.row_ptr[r.local + i + 1] - p.row_ptr[r.local + i];
  }
  for (std::int64_t i = 0; i < n_rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  m.col_idx.resize(static_cast<std::size_t>(m.row_ptr.back()));
  m.values.resize(m.col_idx.size());
  for (const Range& r : ranges) {
    const PartialMatrix& part = partials[r.partial];
    const SparseMatrix& p = part.matrix;
    const std::int64_t src = p.row_ptr[r.local], len = p.row_ptr[r.local + (r.end - r.begin)] - src;
    std::copy_n(p.col_idx.begin() + src, len, m.col_idx.begin() + m.row_ptr[r.begin]);
    std::copy_n(p.values.begin() + src, len, m.values.begin() + m.row_ptr[r.begin]);
    if (load && !part.load.empty())
      std::copy_n(part.load.begin() + r.local, r.end - r.begin, load->begin() + r.begin);
  }
  return m;
}

void write_partition_map(const std::filesystem::path& path, const Partition& partition) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (int k : partition.part) out << k << '\n';
}

std::vector<int> read_partition_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<int> part;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    int k;
    if (!(ss >> k) || k < 0) throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad part id");
    part.push_back(k);
  }
  return part;
}

namespace {
std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}
}  // namespace

void write_partial(const std::filesystem::path& stem, const PartialMatrix& partial) {
  write_matrix_market(with_suffix(stem, ".mtx"), partial.matrix);
  std::ofstream out(with_suffix(stem, ".rows"));
  if (!out) throw std::runtime_error("cannot write " + with_suffix(stem, ".rows").string());
  out << "part " << partial.part << " n_cols " << partial.matrix.n_cols << '\n';
  for (const auto& [b, e] : partial.row_ranges) out << b << ' ' << e << '\n';
}

PartialMatrix read_partial(const std::filesystem::path& stem) {
  PartialMatrix p;
  p.matrix = read_matrix_market(with_suffix(stem, ".mtx"));
  const auto rows = with_suffix(stem, ".rows");
  std::ifstream in(rows);
  if (!in) throw std::runtime_error("cannot open " + rows.string());
  std::string tag, tag2;
  std::int64_t n_cols = 0;
  if (!(in >> tag >> p.part >> tag2 >> n_cols) || tag != "part" || tag2 != "n_cols")
    throw std::runtime_error(rows.string() + ":1: expected `part <id> n_cols <n>`");
  std::int64_t b, e;
  while (in >> b >> e) p.row_ranges.push_back({b, e});
  return p;
}

}  // namespace polydg
