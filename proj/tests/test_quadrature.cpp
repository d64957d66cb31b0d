#include <doctest.h>

#include <cmath>
#include <functional>
#include <thread>

#include "polydg/quadrature.hpp"
#include "support.hpp"

using namespace polydg;

namespace {

double integrate_monomial(const QuadratureRule& r, const std::vector<int>& a) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    double v = r.weights[q];
    for (std::size_t i = 0; i < a.size(); ++i) v *= std::pow(r.point(q)[i], a[i]);
    s += v;
  }
  return s;
}

void for_each_exponent(int d, int max_total, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(d, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == d) {
      fn(a);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      a[i] = e;
      rec(i + 1, left - e);
    }
  };
  rec(0, max_total);
}

}  // namespace

TEST_CASE("barycenter rule on the unit triangle") {
  const QuadratureRule r = simplex_rule(2, 1);
  REQUIRE(r.size() == 1);
  CHECK(r.point(0)[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(r.point(0)[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("order-0 tetrahedron rule carries the volume") {
  const QuadratureRule r = simplex_rule(3, 0);
  double s = 0.0;
  for (double w : r.weights) s += w;
  CHECK(std::abs(s - 1.0 / 6.0) < 1e-15);
}

TEST_CASE("x^2 y^2 over the unit triangle") {
  const QuadratureRule r = simplex_rule(2, 4);
  const double exact = testing::simplex_monomial_integral({2, 2});
  CHECK(std::abs(exact - 1.0 / 180.0) < 1e-18);
  CHECK(std::abs(integrate_monomial(r, {2, 2}) - exact) < 1e-15);
}

TEST_CASE("simplex rules are exact up to their order") {
  for (int d = 1; d <= 3; ++d)
    for (int order = 0; order <= 20; order += (d == 3 ? 2 : 1)) {
      const QuadratureRule r = simplex_rule(d, order);
      for (double w : r.weights) REQUIRE(w > 0.0);
      double worst = 0.0;
      for_each_exponent(d, order, [&](const std::vector<int>& a) {
        worst = std::max(worst, std::abs(integrate_monomial(r, a) - testing::simplex_monomial_integral(a)));
      });
      CAPTURE(d);
      CAPTURE(order);
      CHECK(worst < 1e-13);
    }
}

TEST_CASE("orders above the cap are rejected") {
  CHECK_THROWS_AS(simplex_rule(2, kMaxQuadratureOrder + 1), std::invalid_argument);
  CHECK_NOTHROW(simplex_rule(1, 30));
}

TEST_CASE("interval rules") {
  const QuadratureRule one = interval_rule(1);
  REQUIRE(one.size() == 1);
  CHECK(one.point(0)[0] == doctest::Approx(0.5));
  CHECK(one.weights[0] == doctest::Approx(1.0));

  const QuadratureRule two = interval_rule(3);
  REQUIRE(two.size() == 2);
  const double off = 1.0 / (2.0 * std::sqrt(3.0));
  CHECK(std::abs(two.point(0)[0] - (0.5 - off)) < 1e-15);
  CHECK(std::abs(two.point(1)[0] - (0.5 + off)) < 1e-15);
  CHECK(std::abs(two.weights[0] - 0.5) < 1e-15);
  CHECK(std::abs(two.weights[1] - 0.5) < 1e-15);
}

TEST_CASE("prism rule is the tensor product") {
  const QuadratureRule p = prism_rule(simplex_rule(2, 1), interval_rule(1));
  REQUIRE(p.size() == 1);
  CHECK(p.weights[0] == doctest::Approx(0.5));
  CHECK(p.dim == 3);
  // x^2 y t^3 on (unit triangle) x [0,1]
  const QuadratureRule q = prism_rule(simplex_rule(2, 3), interval_rule(3));
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto x = q.point(i);
    s += q.weights[i] * x[0] * x[0] * x[1] * x[2] * x[2] * x[2];
  }
  CHECK(std::abs(s - testing::simplex_monomial_integral({2, 1}) / 4.0) < 1e-15);
}

TEST_CASE("affine push-forward to a physical triangle") {
  const std::array<Vec, 3> tri{Vec{0, 0}, Vec{2, 0}, Vec{0, 2}};
  const MappedRule m = map_to_simplex(simplex_rule(2, 1), tri, 2);
  REQUIRE(m.size() == 1);
  CHECK(m.points[0][0] == doctest::Approx(2.0 / 3.0));
  CHECK(m.points[0][1] == doctest::Approx(2.0 / 3.0));
  CHECK(m.weights[0] == doctest::Approx(2.0));

  const QuadratureRule ref = simplex_rule(2, 5);
  const std::array<Vec, 3> unit{Vec{0, 0}, Vec{1, 0}, Vec{0, 1}};
  const MappedRule id = map_to_simplex(ref, unit, 2);
  for (std::size_t q = 0; q < ref.size(); ++q) {
    CHECK(std::abs(id.points[q][0] - ref.point(q)[0]) < 1e-16);
    CHECK(std::abs(id.points[q][1] - ref.point(q)[1]) < 1e-16);
    CHECK(id.weights[q] == ref.weights[q]);
  }
}

TEST_CASE("mapped weights over the two-triangle square sum to one") {
  const auto mesh = testing::two_triangle_square();
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.num_simplices(); ++t) {
    const auto v = mesh.simplex_vertices(t);
    const MappedRule m = map_to_simplex(simplex_rule(2, 3), std::span(v.data(), 3), 2);
    for (double w : m.weights) s += w;
  }
  CHECK(std::abs(s - 1.0) < 1e-14);
}

TEST_CASE("degenerate simplices are rejected") {
  const std::array<Vec, 3> flat{Vec{0, 0}, Vec{1, 1}, Vec{2, 2}};
  CHECK_THROWS_AS(map_to_simplex(simplex_rule(2, 1), flat, 2), std::invalid_argument);
}

TEST_CASE("push-forward integrates physical polynomials exactly") {
  // x^2 y^3 z over the tetrahedron with vertices at the origin and at 2e1, 3e2, e3:
  // substituting x = 2u, y = 3v, z = w gives 2^2 3^3 (2 * 3) int u^2 v^3 w.
  const std::array<Vec, 4> tet{Vec{0, 0, 0}, Vec{2, 0, 0}, Vec{0, 3, 0}, Vec{0, 0, 1}};
  const MappedRule m = map_to_simplex(simplex_rule(3, 6), tet, 3);
  double s = 0.0;
  for (std::size_t q = 0; q < m.size(); ++q) {
    const Vec& x = m.points[q];
    s += m.weights[q] * x[0] * x[0] * x[1] * x[1] * x[1] * x[2];
  }
  const double exact = 4.0 * 27.0 * 6.0 * testing::simplex_monomial_integral({2, 3, 1});
  CHECK(std::abs(s - exact) < 1e-12 * exact);
}

TEST_CASE("extruded cells integrate prisms") {
  Cell cell;
  cell.vertices = {Vec{0, 0, 1}, Vec{1, 0, 1}, Vec{0, 1, 1}};
  cell.simplex_dim = 2;
  cell.extrusion = 0.5;
  MappedRule m;
  map_to_cell(cell_rule(2, true, 3), cell, 3, m);
  double vol = 0.0, t_moment = 0.0;
  for (std::size_t q = 0; q < m.size(); ++q) {
    vol += m.weights[q];
    t_moment += m.weights[q] * m.points[q][2];
  }
  CHECK(std::abs(vol - 0.25) < 1e-15);
  CHECK(std::abs(t_moment - 0.25 * 1.25) < 1e-15);
  CHECK(cell.measure(3) == doctest::Approx(0.25));
}

TEST_CASE("memoized rules are shared across threads") {
  std::vector<const QuadratureRule*> seen(4, nullptr);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) threads.emplace_back([&seen, t] { seen[t] = &cell_rule(3, false, 17); });
  for (auto& th : threads) th.join();
  for (int t = 1; t < 4; ++t) CHECK(seen[t] == seen[0]);
}
