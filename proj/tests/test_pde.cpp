#include <doctest.h>

#include <cmath>

#include "polydg/assembly.hpp"
#include "polydg/discretization.hpp"
#include "polydg/pde.hpp"
#include "polydg/problems.hpp"
#include "support.hpp"

using namespace polydg;

namespace {

Tensor identity(int d) {
  Tensor t{};
  for (int i = 0; i < d; ++i) t[i][i] = 1.0;
  return t;
}

PenaltyElementData unit_square_element(bool coverable) {
  PenaltyElementData e;
  e.volume = 1.0;
  e.degree = 1;
  e.a_bar = 1.0;
  e.sup_adjacent_volume = 0.5;
  e.coverable = coverable;
  return e;
}

const std::vector<Vec> kEdgePoints{Vec{0.1, 0}, Vec{0.5, 0}, Vec{0.9, 0}};
const std::vector<double> kEdgeWeights{0.25, 0.5, 0.25};

}  // namespace

TEST_CASE("penalty examples") {
  const PenaltyElementData plain = unit_square_element(false);
  CHECK(penalty_sigma(1.0, plain, nullptr, 10.0, 2) == 20.0);
  const PenaltyElementData cov = unit_square_element(true);
  CHECK(penalty_sigma(1.0, cov, nullptr, 10.0, 2) == 10.0);
  PenaltyElementData dry = plain;
  dry.a_bar = 0.0;
  CHECK(penalty_sigma(1.0, dry, nullptr, 10.0, 2) == 0.0);
}

TEST_CASE("penalty takes the larger side and scales as documented") {
  PenaltyElementData a = unit_square_element(true), b = unit_square_element(true);
  b.volume = 0.25;
  b.sup_adjacent_volume = 0.125;
  // side b: min(2, 1) * 1 * 1 * 1 / 0.25 = 4
  CHECK(penalty_sigma(1.0, a, &b, 10.0, 2) == doctest::Approx(40.0));
  CHECK(penalty_sigma(1.0, b, &a, 10.0, 2) == doctest::Approx(40.0));
  CHECK(penalty_sigma(1.0, a, &b, 5.0, 2) == doctest::Approx(20.0));
  // With the coverable branch active on both, cubic degree gives C_cov = 9 > 2.
  a.degree = b.degree = 3;
  CHECK(penalty_sigma(1.0, a, &b, 10.0, 2) == doctest::Approx(10.0 * 2.0 * 9.0 / 0.25));
  const double s1 = penalty_sigma(0.7, unit_square_element(false), nullptr, 10.0, 3);
  PenaltyElementData p2 = unit_square_element(false);
  p2.degree = 2;
  CHECK(penalty_sigma(0.7, p2, nullptr, 10.0, 3) == doctest::Approx(4.0 * s1));
}

TEST_CASE("penalty of a boundary edge from the discretization") {
  const PolytopicMesh mesh = agglomerate(testing::two_triangle_square(), {0, 0});
  const int p = 1;
  const Discretization disc = discretize(mesh, std::span(&p, 1));
  PenaltyConfig cfg;
  cfg.c_sigma = 10.0;
  const auto diffusion = [](const Vec&) { return identity(2); };
  for (std::size_t f = 0; f < disc.faces.size(); ++f) {
    CHECK(disc.faces[f].sup_owner == doctest::Approx(0.5));
    CHECK(face_sigma(disc, f, diffusion, cfg, 2) == doctest::Approx(20.0));
  }
  cfg.coverable = {true};
  CHECK(face_sigma(disc, 0, diffusion, cfg, 2) == doctest::Approx(10.0));
  CHECK(face_sigma(disc, 0, [](const Vec&) { return Tensor{}; }, cfg, 2) == 0.0);
}

TEST_CASE("boundary classification") {
  PdeCoefficients diff;
  diff.dim = 2;
  diff.diffusion = [](const Vec&) { return identity(2); };
  const Vec down{0, -1};
  CHECK(classify_boundary_face(diff, down, kEdgePoints, kEdgeWeights, {}) == BoundaryTag::Dirichlet);
  const DirichletPredicate never = [](const Vec&, const Vec&) { return false; };
  CHECK(classify_boundary_face(diff, down, kEdgePoints, kEdgeWeights, never) == BoundaryTag::Neumann);

  PdeCoefficients hyp;
  hyp.dim = 2;
  hyp.advection = [](const Vec&) { return Vec{1, 0}; };
  const std::vector<Vec> left{Vec{0, 0.2}, Vec{0, 0.8}};
  const std::vector<double> w{0.5, 0.5};
  CHECK(classify_boundary_face(hyp, Vec{-1, 0}, left, w, {}) == BoundaryTag::Inflow);
  CHECK(classify_boundary_face(hyp, Vec{1, 0}, left, w, {}) == BoundaryTag::Outflow);
  CHECK(classify_boundary_face(hyp, Vec{0, -1}, kEdgePoints, kEdgeWeights, {}) == BoundaryTag::Outflow);
}

TEST_CASE("faces straddling inflow and outflow are rejected") {
  PdeCoefficients hyp;
  hyp.dim = 2;
  hyp.advection = [](const Vec& x) { return Vec{0, x[0] - 0.5}; };
  CHECK_THROWS_AS(classify_boundary_face(hyp, Vec{0, -1}, kEdgePoints, kEdgeWeights, {}), ClassificationError);
  CHECK_THROWS_AS(elemental_inflow_part(hyp, Vec{0, -1}, kEdgePoints, kEdgeWeights), ClassificationError);
  // Dirichlet faces carry the upwind term too; Neumann faces do not look at b . n.
  hyp.diffusion = [](const Vec&) { return identity(2); };
  CHECK_THROWS_AS(classify_boundary_face(hyp, Vec{0, -1}, kEdgePoints, kEdgeWeights, {}), ClassificationError);
  const DirichletPredicate never = [](const Vec&, const Vec&) { return false; };
  CHECK(classify_boundary_face(hyp, Vec{0, -1}, kEdgePoints, kEdgeWeights, never) == BoundaryTag::Neumann);
}

TEST_CASE("slab bottoms are inflow and tops outflow under the block coefficients") {
  SpaceTimeCoefficients st;
  st.spatial_dim = 2;
  st.diffusion = [](const Vec&) { return identity(2); };
  st.advection = [](const Vec&) { return Vec{0.3, -0.2}; };
  const PdeCoefficients block = block_coefficients(st);
  CHECK(block.dim == 3);
  const Tensor a = block.A(Vec{0.2, 0.3, 0.5});
  CHECK(a[2][2] == 0.0);
  CHECK(a[0][2] == 0.0);
  CHECK(a[0][0] == 1.0);
  const Vec b = block.b(Vec{0.2, 0.3, 0.5});
  CHECK(b[2] == 1.0);
  CHECK(b[0] == 0.3);
  const std::vector<Vec> pts{Vec{0.2, 0.2, 0.5}, Vec{0.6, 0.1, 0.5}};
  const std::vector<double> w{0.25, 0.25};
  CHECK(classify_boundary_face(block, Vec{0, 0, -1}, pts, w, {}) == BoundaryTag::Inflow);
  CHECK(classify_boundary_face(block, Vec{0, 0, 1}, pts, w, {}) == BoundaryTag::Outflow);
  CHECK(classify_boundary_face(block, Vec{1, 0, 0}, pts, w, {}) == BoundaryTag::Dirichlet);
}

TEST_CASE("elemental inflow part") {
  PdeCoefficients c;
  c.dim = 2;
  c.advection = [](const Vec&) { return Vec{1, 0}; };
  const std::vector<Vec> pts{Vec{1, 0.5}};
  const std::vector<double> w{1.0};
  CHECK(elemental_inflow_part(c, Vec{1, 0}, pts, w) == ElementSide::OutflowForElement);
  CHECK(elemental_inflow_part(c, Vec{-1, 0}, pts, w) == ElementSide::InflowForElement);
  PdeCoefficients still;
  still.dim = 2;
  CHECK(elemental_inflow_part(still, Vec{1, 0}, pts, w) == ElementSide::OutflowForElement);
  CHECK(elemental_inflow_part(still, Vec{-1, 0}, pts, w) == ElementSide::OutflowForElement);
}

TEST_CASE("semidefinite diffusion check") {
  CHECK(diffusion_is_psd(identity(3), 3));
  CHECK(diffusion_is_psd(Tensor{}, 3));
  Tensor t{};
  t[0][0] = 1.0;
  t[1][1] = -0.5;
  CHECK_FALSE(diffusion_is_psd(t, 2));
}

TEST_CASE("named problems satisfy their equations") {
  // Residual of the strong form by central differences of the exact solution.
  const double h = 1e-4;
  const NamedProblem adv = named_problem("advdiff3d");
  CHECK_FALSE(adv.space_time);
  for (const Vec& x : {Vec{0.3, 0.6, 0.2}, Vec{0.81, 0.15, 0.55}}) {
    double lap = 0.0, bgrad = 0.0;
    const Vec b = adv.coeffs.b(x);
    const Vec g = adv.coeffs.exact_gradient(x);
    for (int k = 0; k < 3; ++k) {
      Vec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      lap += (adv.coeffs.exact(xp) - 2 * adv.coeffs.exact(x) + adv.coeffs.exact(xm)) / (h * h);
      bgrad += b[k] * (adv.coeffs.exact(xp) - adv.coeffs.exact(xm)) / (2 * h);
      CHECK(g[k] == doctest::Approx((adv.coeffs.exact(xp) - adv.coeffs.exact(xm)) / (2 * h)).epsilon(1e-6));
    }
    const double strong = -0.01 * lap + bgrad + adv.coeffs.c(x) * adv.coeffs.exact(x);
    CHECK(adv.coeffs.f(x) == doctest::Approx(strong).epsilon(1e-6));
    CHECK(adv.coeffs.A(x)[1][1] == 0.01);
    CHECK(adv.coeffs.c(x) == doctest::Approx(3 + x[0] * x[1] * x[2]));
  }

  const NamedProblem par = named_problem("parabolic-sine");
  REQUIRE(par.space_time);
  for (const Vec& xt : {Vec{0.3, 0.6, 0.2}, Vec{0.71, 0.45, 0.9}}) {
    double lap = 0.0;
    for (int k = 0; k < 2; ++k) {
      Vec xp = xt, xm = xt;
      xp[k] += h;
      xm[k] -= h;
      lap += (par.st.exact(xp) - 2 * par.st.exact(xt) + par.st.exact(xm)) / (h * h);
    }
    Vec tp = xt, tm = xt;
    tp[2] += h;
    tm[2] -= h;
    const double ut = (par.st.exact(tp) - par.st.exact(tm)) / (2 * h);
    CHECK(par.st.f(xt) == doctest::Approx(ut - lap + par.st.exact(xt)).epsilon(1e-6));
    CHECK(par.st.u0(xt) == doctest::Approx(std::sin(M_PI * xt[0]) * std::sin(M_PI * xt[1])));
  }
  CHECK_THROWS(named_problem("no-such-problem"));
}
