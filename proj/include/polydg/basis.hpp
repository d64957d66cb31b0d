#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "polydg/geometry.hpp"

namespace polydg {

/// Local polynomial space: total degree p in all variables (P), or degree p in
/// the last (time) variable tensorized with total degree p in the others (PQ).
enum class Family { TotalDegree, SpaceTime };

inline constexpr int kMaxDegree = 20;

struct MultiIndex {
  std::array<std::uint8_t, kMaxDim> alpha{};
  int total(int dim) const {
    int s = 0;
    for (int i = 0; i < dim; ++i) s += alpha[i];
    return s;
  }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

std::size_t num_basis(int p, int d, Family family);

/// Basis ordering, which fixes the layout of every element block.
///
/// TotalDegree: graded by |alpha|; within one grade, lexicographically
/// descending in (alpha_0, alpha_1, ...). The first C(q+d,d) entries span
/// total degree q for every q <= p.
/// SpaceTime: time-major; the temporal exponent (last component) varies
/// slowest, and each temporal slice lists the spatial indices in the
/// TotalDegree order of dimension d-1.
std::shared_ptr<const std::vector<MultiIndex>> basis_indices(int p, int d, Family family);

/// Orthonormal Legendre basis on an element's axis-aligned bounding box,
/// evaluated directly in physical coordinates.
class BasisSpec {
 public:
  BasisSpec() = default;
  BasisSpec(const Box& box, int degree, Family family);

  int dim() const { return box_.dim; }
  int degree() const { return degree_; }
  Family family() const { return family_; }
  const Box& box() const { return box_; }
  std::size_t size() const { return indices_->size(); }
  const std::vector<MultiIndex>& indices() const { return *indices_; }

  /// Value and gradient for all basis functions at x. `grads` holds dim()
  /// entries per function (function-major); pass an empty span to skip.
  void evaluate(const Vec& x, std::span<double> values, std::span<double> grads) const;

  /// Value of every basis function at x (no gradients).
  void evaluate(const Vec& x, std::span<double> values) const { evaluate(x, values, {}); }

 private:
  void legendre_tables(const Vec& x, double* vals, double* ders, bool need_ders) const;

  Box box_{};
  int degree_ = 0;
  Family family_ = Family::TotalDegree;
  Vec center_{};
  Vec inv_half_{};  // 2 / (b_i - a_i)
  double scale_ = 1.0;
  std::shared_ptr<const std::vector<MultiIndex>> indices_;
};

double eval_basis(const BasisSpec& spec, const MultiIndex& idx, const Vec& x);
Vec eval_grad(const BasisSpec& spec, const MultiIndex& idx, const Vec& x);

/// Normalized Legendre polynomials sqrt((2n+1)/2) P_n(t), n = 0..p, and
/// optionally their derivatives.
void orthonormal_legendre(int p, double t, double* vals, double* ders);

}  // namespace polydg
