#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polydg/geometry.hpp"
#include "polydg/quadrature.hpp"

namespace polydg {

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;
using TensorField = std::function<Tensor(const Vec&)>;

/// Coefficients of  -div(A grad u) + b . grad u + c u = f  with boundary data.
/// Empty callables evaluate to zero.
struct PdeCoefficients {
  int dim = 0;
  TensorField diffusion;
  VectorField advection;
  ScalarField reaction;
  ScalarField source;
  ScalarField dirichlet;
  ScalarField neumann;
  ScalarField exact;
  VectorField exact_gradient;

  Tensor A(const Vec& x) const { return diffusion ? diffusion(x) : Tensor{}; }
  Vec b(const Vec& x) const { return advection ? advection(x) : Vec{}; }
  double c(const Vec& x) const { return reaction ? reaction(x) : 0.0; }
  double f(const Vec& x) const { return source ? source(x) : 0.0; }
  double g_D(const Vec& x) const { return dirichlet ? dirichlet(x) : 0.0; }
  double g_N(const Vec& x) const { return neumann ? neumann(x) : 0.0; }
};

/// Parabolic problem  u_t - div(a grad_x u) + w . grad_x u + c u = f  on a
/// spatial domain of dimension `spatial_dim`. Every callable receives a
/// space-time point with the time in component `spatial_dim`; `initial`
/// receives the spatial point only.
struct SpaceTimeCoefficients {
  int spatial_dim = 0;
  TensorField diffusion;
  VectorField advection;
  ScalarField reaction;
  ScalarField source;
  ScalarField dirichlet;
  ScalarField neumann;
  ScalarField initial;
  ScalarField exact;
  VectorField exact_gradient;  // space-time gradient, time last

  Tensor a(const Vec& xt) const { return diffusion ? diffusion(xt) : Tensor{}; }
  Vec w(const Vec& xt) const { return advection ? advection(xt) : Vec{}; }
  double c(const Vec& xt) const { return reaction ? reaction(xt) : 0.0; }
  double f(const Vec& xt) const { return source ? source(xt) : 0.0; }
  double g_D(const Vec& xt) const { return dirichlet ? dirichlet(xt) : 0.0; }
  double g_N(const Vec& xt) const { return neumann ? neumann(xt) : 0.0; }
  double u0(const Vec& x) const { return initial ? initial(x) : 0.0; }
};

/// The same problem as a stationary one in dimension spatial_dim + 1 with
/// A = [[a, 0], [0, 0]] and b = (w, 1). Dirichlet data is g_D; data on the
/// slab bottoms (inflow faces) must be supplied separately by the caller.
PdeCoefficients block_coefficients(const SpaceTimeCoefficients& st);

/// A(x) symmetric positive semidefinite within 1e-12 |xi|^2 ||A||; checked
/// on unit coordinate and diagonal directions.
bool diffusion_is_psd(const Tensor& a, int dim);

struct PenaltyConfig {
  double c_sigma = 10.0;
  std::vector<bool> coverable;  // per element; missing entries are false

  bool is_coverable(std::size_t element) const { return element < coverable.size() && coverable[element]; }
};

enum class BoundaryTag { Interior, Dirichlet, Neumann, Inflow, Outflow };

const char* to_string(BoundaryTag tag);

/// Chooses Dirichlet (true) or Neumann (false) for faces of the elliptic
/// boundary portion, given the face barycenter and outward normal.
using DirichletPredicate = std::function<bool(const Vec& barycenter, const Vec& normal)>;

class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficient samples on one face, normal fixed to the outward direction of
/// the element being classified.
struct FaceSamples {
  double nAn = 0.0;     // n^T A n at the barycenter
  double a_norm = 0.0;  // max-row-sum norm of A at the barycenter
  double bn = 0.0;      // b . n at the barycenter
  double bn_min = 0.0;  // over the face quadrature points
  double bn_max = 0.0;
  double b_scale = 0.0;  // max |b| over the points
};

FaceSamples sample_face(const PdeCoefficients& coeffs, const Vec& normal, std::span<const Vec> points,
                        std::span<const double> weights);

/// Tag for a boundary face from its samples; `dirichlet` is the predicate's
/// verdict for the elliptic case. Throws ClassificationError when b . n
/// changes sign across a face where the tag depends on it.
BoundaryTag classify_from_samples(const FaceSamples& s, bool dirichlet);

BoundaryTag classify_boundary_face(const PdeCoefficients& coeffs, const Vec& normal, std::span<const Vec> points,
                                   std::span<const double> weights, const DirichletPredicate& predicate);

enum class ElementSide { InflowForElement, OutflowForElement };

/// Upwind side of a face relative to an element whose outward normal is `normal`.
ElementSide elemental_inflow_part(const FaceSamples& s);
ElementSide elemental_inflow_part(const PdeCoefficients& coeffs, const Vec& normal, std::span<const Vec> points,
                                  std::span<const double> weights);

/// Element quantities entering the face penalty.
struct PenaltyElementData {
  double volume = 0.0;
  int degree = 0;
  double a_bar = 0.0;                // max of n^T A n over the element's volume quadrature points
  double sup_adjacent_volume = 0.0;  // largest subdivision simplex touching the face
  bool coverable = false;
};

/// sigma = C_sigma max_k min(|k| / sup|K^F|, C_cov) a_bar p^2 |F| / |k|, with
/// C_cov = p^(2(d-1)) for coverable elements and infinity otherwise. Pass
/// `neighbor = nullptr` for Dirichlet faces.
double penalty_sigma(double face_measure, const PenaltyElementData& owner, const PenaltyElementData* neighbor,
                     double c_sigma, int dim);

}  // namespace polydg
