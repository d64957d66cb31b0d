#include "polydg/basis.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

namespace polydg {

namespace {

struct LegendreConstants {
  std::array<double, kMaxDegree + 1> a{};     // (2n+1)/(n+1)
  std::array<double, kMaxDegree + 1> b{};     // n/(n+1)
  std::array<double, kMaxDegree + 1> norm{};  // sqrt((2n+1)/2)
  LegendreConstants() {
    for (int n = 0; n <= kMaxDegree; ++n) {
      a[n] = (2.0 * n + 1.0) / (n + 1.0);
      b[n] = n / (n + 1.0);
      norm[n] = std::sqrt((2.0 * n + 1.0) / 2.0);
    }
  }
};

const LegendreConstants& constants() {
  static const LegendreConstants c;
  return c;
}

std::size_t binomial(int n, int k) {
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

// All alpha in N^d with |alpha| = k, lexicographically descending.
void graded_slice(int d, int k, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == d - 1) {
    cur.alpha[pos] = static_cast<std::uint8_t>(k);
    out.push_back(cur);
    return;
  }
  for (int a = k; a >= 0; --a) {
    cur.alpha[pos] = static_cast<std::uint8_t>(a);
    graded_slice(d, k - a, pos + 1, cur, out);
  }
}

std::vector<MultiIndex> total_degree_indices(int p, int d) {
  std::vector<MultiIndex> out;
  if (d == 0) {
    out.emplace_back();
    return out;
  }
  for (int k = 0; k <= p; ++k) {
    MultiIndex cur;
    graded_slice(d, k, 0, cur, out);
  }
  return out;
}

}  // namespace

void orthonormal_legendre(int p, double t, double* vals, double* ders) {
  const auto& c = constants();
  double pm1 = 0.0, pn = 1.0;
  double dm1 = 0.0, dn = 0.0;
  vals[0] = pn * c.norm[0];
  if (ders) ders[0] = 0.0;
  for (int n = 0; n < p; ++n) {
    const double next = std::fma(c.a[n] * t, pn, -c.b[n] * pm1);
    const double dnext = std::fma(2.0 * n + 1.0, pn, dm1);
    pm1 = pn;
    pn = next;
    dm1 = dn;
    dn = dnext;
    vals[n + 1] = pn * c.norm[n + 1];
    if (ders) ders[n + 1] = dn * c.norm[n + 1];
  }
}

std::size_t num_basis(int p, int d, Family family) {
  if (p < 0) throw std::invalid_argument("num_basis: negative degree");
  if (family == Family::TotalDegree) return binomial(p + d, d);
  const int s = d - 1;
  return static_cast<std::size_t>(p + 1) * binomial(p + s, s);
}

std::shared_ptr<const std::vector<MultiIndex>> basis_indices(int p, int d, Family family) {
  if (p < 0 || p > kMaxDegree) throw std::invalid_argument("basis degree " + std::to_string(p) + " unsupported");
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("basis dimension " + std::to_string(d) + " unsupported");
  if (family == Family::SpaceTime && d < 2) throw std::invalid_argument("space-time basis needs d >= 2");
  static std::mutex mutex;
  static std::map<std::tuple<int, int, Family>, std::shared_ptr<const std::vector<MultiIndex>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{p, d, family}];
  if (!slot) {
    std::vector<MultiIndex> out;
    if (family == Family::TotalDegree) {
      out = total_degree_indices(p, d);
    } else {
      const auto spatial = total_degree_indices(p, d - 1);
      for (int t = 0; t <= p; ++t)
        for (MultiIndex idx : spatial) {
          idx.alpha[d - 1] = static_cast<std::uint8_t>(t);
          out.push_back(idx);
        }
    }
    slot = std::make_shared<const std::vector<MultiIndex>>(std::move(out));
  }
  return slot;
}

BasisSpec::BasisSpec(const Box& box, int degree, Family family)
    : box_(box), degree_(degree), family_(family), indices_(basis_indices(degree, box.dim, family)) {
  double measure = 1.0;
  for (int i = 0; i < box.dim; ++i) {
    const double width = box.hi[i] - box.lo[i];
    if (!(width > 0.0)) throw std::invalid_argument("BasisSpec: degenerate bounding box");
    center_[i] = 0.5 * (box.lo[i] + box.hi[i]);
    inv_half_[i] = 2.0 / width;
    measure *= 0.5 * width;
  }
  scale_ = 1.0 / std::sqrt(measure);
}

void BasisSpec::legendre_tables(const Vec& x, double* vals, double* ders, bool need_ders) const {
  const int stride = degree_ + 1;
  for (int i = 0; i < box_.dim; ++i) {
    const double t = (x[i] - center_[i]) * inv_half_[i];
    orthonormal_legendre(degree_, t, vals + i * stride, need_ders ? ders + i * stride : nullptr);
  }
}

void BasisSpec::evaluate(const Vec& x, std::span<double> values, std::span<double> grads) const {
  constexpr int kStride = kMaxDegree + 1;
  std::array<double, kMaxDim * kStride> vals;
  std::array<double, kMaxDim * kStride> ders;
  const bool need_grads = !grads.empty();
  const int d = box_.dim;
  const int stride = degree_ + 1;
  legendre_tables(x, vals.data(), ders.data(), need_grads);
  const auto& idx = *indices_;
  for (std::size_t f = 0; f < idx.size(); ++f) {
    const auto& a = idx[f].alpha;
    double v[kMaxDim];
    double prod = scale_;
    for (int i = 0; i < d; ++i) {
      v[i] = vals[i * stride + a[i]];
      prod *= v[i];
    }
    values[f] = prod;
    if (!need_grads) continue;
    for (int k = 0; k < d; ++k) {
      double g = scale_ * inv_half_[k] * ders[k * stride + a[k]];
      for (int i = 0; i < d; ++i)
        if (i != k) g *= v[i];
      grads[f * d + k] = g;
    }
  }
}

double eval_basis(const BasisSpec& spec, const MultiIndex& idx, const Vec& x) {
  std::vector<double> vals(spec.size());
  spec.evaluate(x, vals);
  const auto& all = spec.indices();
  for (std::size_t f = 0; f < all.size(); ++f)
    if (all[f] == idx) return vals[f];
  throw std::invalid_argument("eval_basis: multi-index not in the basis");
}

Vec eval_grad(const BasisSpec& spec, const MultiIndex& idx, const Vec& x) {
  const int d = spec.dim();
  std::vector<double> vals(spec.size()), grads(spec.size() * d);
  spec.evaluate(x, vals, grads);
  const auto& all = spec.indices();
  for (std::size_t f = 0; f < all.size(); ++f)
    if (all[f] == idx) {
      Vec g{};
      for (int k = 0; k < d; ++k) g[k] = grads[f * d + k];
      return g;
    }
  throw std::invalid_argument("eval_grad: multi-index not in the basis");
}

}  // namespace polydg
