#include "polydg/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace polydg {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

class BlockJacobi {
 public:
  BlockJacobi(const SparseMatrix& a, std::span<const std::int64_t> offsets) {
    if (offsets.empty()) {
      offsets_.resize(static_cast<std::size_t>(a.n_rows + 1));
      for (std::int64_t i = 0; i <= a.n_rows; ++i) offsets_[i] = i;
    } else {
      offsets_.assign(offsets.begin(), offsets.end());
    }
    if (offsets_.back() != a.n_rows) throw std::invalid_argument("block offsets do not cover the matrix");
    lu_.reserve(offsets_.size() - 1);
    for (std::size_t b = 0; b + 1 < offsets_.size(); ++b) {
      const std::int64_t r0 = offsets_[b], n = offsets_[b + 1] - r0;
      Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
      for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t k = a.row_ptr[r0 + i]; k < a.row_ptr[r0 + i + 1]; ++k) {
          const std::int64_t c = a.col_idx[k] - r0;
          if (c >= 0 && c < n) block(i, c) = a.values[k];
        }
      // A zero block (e.g. from an empty row) is replaced by the identity.
      if (block.isZero(0.0)) block.setIdentity();
      lu_.emplace_back(block);
    }
  }

  void apply(std::span<const double> in, std::span<double> out) const {
    for (std::size_t b = 0; b + 1 < offsets_.size(); ++b) {
      const std::int64_t r0 = offsets_[b], n = offsets_[b + 1] - r0;
      Eigen::Map<const Eigen::VectorXd> x(in.data() + r0, n);
      Eigen::Map<Eigen::VectorXd> y(out.data() + r0, n);
      y = lu_[b].solve(x);
    }
  }

 private:
  std::vector<std::int64_t> offsets_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

}  // namespace

double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> rhs) {
  std::vector<double> r(rhs.size());
  a.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
  const double nb = norm2(rhs);
  return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

SolverResult solve(const SparseMatrix& a, std::span<const double> rhs, std::span<const std::int64_t> block_offsets,
                   const SolverOptions& options) {
  if (a.n_rows != a.n_cols || static_cast<std::int64_t>(rhs.size()) != a.n_rows)
    throw std::invalid_argument("solve: matrix must be square and match the right-hand side");
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve: tolerance must be positive");
  const std::size_t n = rhs.size();
  const int m = std::max(1, options.restart);
  const BlockJacobi prec(a, block_offsets);

  SolverResult res;
  res.x.assign(n, 0.0);
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }

  std::vector<std::vector<double>> v(static_cast<std::size_t>(m + 1), std::vector<double>(n));
  std::vector<double> h(static_cast<std::size_t>((m + 1) * m));
  std::vector<double> cs(m), sn(m), g(m + 1), y(m);
  std::vector<double> r(n), z(n), w(n);
  auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(i) * m + j]; };

  while (res.iterations < options.max_iter) {
    a.multiply(res.x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    const double beta = norm2(r);
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= options.tol) {
      res.converged = true;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && res.iterations < options.max_iter; ++k) {
      ++res.iterations;
      prec.apply(v[k], z);
      a.multiply(z, w);
      for (int i = 0; i <= k; ++i) {
        double dotp = 0.0;
        for (std::size_t t = 0; t < n; ++t) dotp += w[t] * v[i][t];
        H(i, k) = dotp;
        for (std::size_t t = 0; t < n; ++t) w[t] -= dotp * v[i][t];
      }
      const double wn = norm2(w);
      H(k + 1, k) = wn;
      if (wn > 0.0)
        for (std::size_t t = 0; t < n; ++t) v[k + 1][t] = w[t] / wn;
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = denom > 0.0 ? H(k, k) / denom : 1.0;
      sn[k] = denom > 0.0 ? H(k + 1, k) / denom : 0.0;
      H(k, k) = denom;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) / bnorm <= 0.5 * options.tol || wn == 0.0) {
        ++k;
        break;
      }
    }
    // Back substitution and update x += M^{-1} V y.
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
      y[i] = H(i, i) != 0.0 ? s / H(i, i) : 0.0;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j)
      for (std::size_t t = 0; t < n; ++t) w[t] += y[j] * v[j][t];
    prec.apply(w, z);
    for (std::size_t t = 0; t < n; ++t) res.x[t] += z[t];
  }
  res.relative_residual = relative_residual(a, res.x, rhs);
  res.converged = res.relative_residual <= options.tol;
  return res;
}

std::vector<double> dense_solve(const SparseMatrix& a, std::span<const double> rhs) {
  const auto dense = to_dense(a);
  Eigen::MatrixXd m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      dense.data(), a.n_rows, a.n_cols);
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = m.fullPivLu().solve(b);
  return {x.data(), x.data() + x.size()};
}

}  // namespace polydg
