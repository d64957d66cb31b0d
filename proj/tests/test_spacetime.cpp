#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "polydg/meshgen.hpp"
#include "polydg/problems.hpp"
#include "polydg/quadrature.hpp"
#include "polydg/spacetime.hpp"
#include "support.hpp"

using namespace polydg;

namespace {

PolytopicMesh unit_square_element() { return agglomerate(testing::two_triangle_square(), {0, 0}); }

SlabMesh slab_of(const PolytopicMesh& m, double t0, double t1, int p, Family fam) {
  return build_slab(m, t0, t1, std::span(&p, 1), fam);
}

// Heat equation with a = I, c = 1 and a smooth solution; no sign change of
// w . n on the lateral boundary of [0,2] x [0,1].
SpaceTimeCoefficients drifting_heat() {
  SpaceTimeCoefficients st;
  st.spatial_dim = 2;
  st.diffusion = [](const Vec&) { return testing::identity_tensor(2); };
  st.advection = [](const Vec&) { return Vec{0.4, 0.0}; };
  st.reaction = [](const Vec&) { return 1.0; };
  st.source = [](const Vec& xt) { return std::cos(xt[0]) * (1 + xt[2]) + xt[1]; };
  st.dirichlet = [](const Vec& xt) { return xt[0] * xt[2]; };
  st.initial = [](const Vec& x) { return std::sin(x[0]) * x[1]; };
  return st;
}

}  // namespace

TEST_CASE("time partitions") {
  const TimePartition t = TimePartition::uniform(1.0, 4);
  REQUIRE(t.num_slabs() == 4);
  CHECK(t.tau(2) == doctest::Approx(0.25));
  CHECK(t.nodes.back() == 1.0);
  CHECK_NOTHROW(t.validate());
  CHECK_THROWS_AS(TimePartition::uniform(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS((TimePartition{{0.0, 0.5, 0.5}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TimePartition{{0.1, 0.5}}.validate()), std::invalid_argument);
}

TEST_CASE("slab geometry") {
  const PolytopicMesh mesh = unit_square_element();
  const SlabMesh slab = slab_of(mesh, 0.0, 0.1, 1, Family::TotalDegree);
  REQUIRE(slab.disc.num_elements() == 1);
  CHECK(slab.disc.dim == 3);
  CHECK(slab.disc.elements[0].volume == doctest::Approx(0.1));
  CHECK(slab.disc.ndofs(0) == 4);
  CHECK(slab_of(mesh, 0.0, 0.1, 1, Family::SpaceTime).disc.ndofs(0) == 6);
  const Box& box = slab.disc.elements[0].basis.box();
  CHECK(box.lo[2] == 0.0);
  CHECK(box.hi[2] == 0.1);

  REQUIRE(slab.disc.faces.size() == mesh.faces.size() + 2);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const FaceData& lat = slab.disc.faces[f];
    CHECK(lat.measure == doctest::Approx(0.1));
    CHECK(lat.normal[2] == 0.0);
    CHECK(lat.kind == FaceKind::Standard);
    double sum = 0.0;
    for (int s = lat.sub_begin; s < lat.sub_end; ++s) {
      CHECK(slab.disc.subfaces[s].is_prism());
      sum += slab.disc.subfaces[s].measure(3);
    }
    CHECK(sum == doctest::Approx(0.1));
  }
  const FaceData& bottom = slab.disc.faces[slab.bottom_face(0)];
  const FaceData& top = slab.disc.faces[slab.top_face(0)];
  CHECK(bottom.kind == FaceKind::SlabBottom);
  CHECK(top.kind == FaceKind::SlabTop);
  CHECK(bottom.normal[2] == -1.0);
  CHECK(top.normal[2] == 1.0);
  CHECK(bottom.measure == doctest::Approx(1.0));
  CHECK(bottom.barycenter[2] == 0.0);
  CHECK(top.barycenter[2] == doctest::Approx(0.1));
  CHECK(bottom.sub_end - bottom.sub_begin == 2);
  double cells = 0.0;
  for (int c = slab.disc.elements[0].cell_begin; c < slab.disc.elements[0].cell_end; ++c)
    cells += slab.disc.cells[c].measure(3);
  CHECK(cells == doctest::Approx(0.1));
}

TEST_CASE("dG(0) keeps a constant") {
  SpaceTimeCoefficients st;
  st.spatial_dim = 2;
  st.initial = [](const Vec&) { return 1.0; };
  const int p = 0;
  const MarchResult m = march(unit_square_element(), TimePartition::uniform(1.0, 3), st, std::span(&p, 1),
                              Family::TotalDegree, AssemblyConfig{}, SolverOptions{});
  REQUIRE(m.solutions.size() == 3);
  for (std::size_t n = 0; n < 3; ++n) {
    const Vec x{0.3, 0.7, m.slabs[n].t0 + 0.2 * (m.slabs[n].t1 - m.slabs[n].t0)};
    CHECK(evaluate_solution(m.slabs[n].disc, m.solutions[n], 0, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.solutions[n][0] == doctest::Approx(m.solutions[0][0]).epsilon(1e-12));
  }
}

TEST_CASE("solutions linear in time are reproduced") {
  SpaceTimeCoefficients st;
  st.spatial_dim = 2;
  st.initial = [](const Vec&) { return 1.0; };
  st.source = [](const Vec&) { return -1.0; };
  for (const Family fam : {Family::SpaceTime, Family::TotalDegree}) {
    const int p = 1;
    const MarchResult m = march(agglomerate(unit_square_mesh(2), {0, 0, 1, 1, 0, 0, 1, 1}),
                                TimePartition::uniform(1.0, 3), st, std::span(&p, 1), fam, AssemblyConfig{},
                                SolverOptions{1e-13, 200, 30});
    for (std::size_t n = 0; n < m.slabs.size(); ++n)
      for (const double s : {0.0, 0.5, 1.0})
        for (int e = 0; e < 2; ++e) {
          const double t = m.slabs[n].t0 + s * (m.slabs[n].t1 - m.slabs[n].t0);
          const Vec x{0.25 + 0.5 * e, 0.4, t};
          CHECK(evaluate_solution(m.slabs[n].disc, m.solutions[n], e, x) == doctest::Approx(1.0 - t).epsilon(1e-10));
        }
  }
}

TEST_CASE("slab kernels match the generic path with block coefficients") {
  // 2 spatial elements x 2 slabs.
  const PolytopicMesh mesh = agglomerate(testing::two_square_strip(), {0, 0, 1, 1});
  const SpaceTimeCoefficients st = drifting_heat();
  AssemblyConfig cfg;
  for (const Family fam : {Family::SpaceTime, Family::TotalDegree}) {
    const int p = 2;
    const MarchResult m = march(mesh, TimePartition::uniform(0.6, 2), st, std::span(&p, 1), fam, cfg, SolverOptions{});
    for (std::size_t n = 0; n < 2; ++n) {
      PreviousSlab prev;
      if (n > 0) prev = {&m.slabs[n - 1].disc, m.solutions[n - 1]};
      const AssemblyResult a = assemble_slab(m.slabs[n], st, cfg, prev);
      const AssemblyResult g = assemble_slab_generic(m.slabs[n], st, cfg, prev);
      CHECK(relative_difference(a.matrix, g.matrix) <= 1e-12);
      double diff = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < a.load.size(); ++i) {
        diff = std::max(diff, std::abs(a.load[i] - g.load[i]));
        scale = std::max(scale, std::abs(g.load[i]));
      }
      CHECK(diff <= 1e-12 * scale);
    }
  }
}

TEST_CASE("time derivative and jump terms against direct quadrature") {
  // Zero spatial operator: the slab matrix is int dt(u) v over the prism plus
  // int u v over the bottom facet.
  SpaceTimeCoefficients st;
  st.spatial_dim = 2;
  const PolytopicMesh mesh = unit_square_element();
  for (const Family fam : {Family::TotalDegree, Family::SpaceTime}) {
    const SlabMesh slab = slab_of(mesh, 0.2, 0.45, 2, fam);
    const AssemblyResult r = assemble_slab(slab, st, AssemblyConfig{}, PreviousSlab{});
    const BasisSpec& basis = slab.disc.elements[0].basis;
    const std::size_t n = basis.size();
    std::vector<double> expected(n * n, 0.0), v(n), g(3 * n);
    const QuadratureRule& tri = simplex_rule(2, 6);
    const QuadratureRule& line = interval_rule(6);
    for (std::size_t s = 0; s < mesh.base.num_simplices(); ++s) {
      const auto verts = mesh.base.simplex_vertices(s);
      const MappedRule m = map_to_simplex(tri, std::span(verts.data(), 3), 2);
      for (std::size_t q = 0; q < m.size(); ++q) {
        const Vec x0{m.points[q][0], m.points[q][1], 0.2};
        basis.evaluate(x0, v);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) expected[i * n + j] += m.weights[q] * v[i] * v[j];
        for (std::size_t k = 0; k < line.size(); ++k) {
          const Vec xt{m.points[q][0], m.points[q][1], 0.2 + 0.25 * line.point(k)[0]};
          basis.evaluate(xt, v, g);
          const double w = m.weights[q] * 0.25 * line.weights[k];
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) expected[i * n + j] += w * g[3 * j + 2] * v[i];
        }
      }
    }
    const auto dense = to_dense(r.matrix);
    double worst = 0.0;
    for (std::size_t k = 0; k < n * n; ++k) worst = std::max(worst, std::abs(dense[k] - expected[k]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("the initial condition reaches every slab but no matrix") {
  const PolytopicMesh mesh = agglomerate(testing::two_square_strip(), {0, 0, 1, 1});
  SpaceTimeCoefficients a = drifting_heat();
  SpaceTimeCoefficients b = a;
  b.initial = [](const Vec& x) { return std::sin(x[0]) * x[1] + 0.1; };
  const int p = 1;
  const AssemblyConfig cfg;
  const MarchResult ma =
      march(mesh, TimePartition::uniform(1.0, 3), a, std::span(&p, 1), Family::SpaceTime, cfg, SolverOptions{});
  const MarchResult mb =
      march(mesh, TimePartition::uniform(1.0, 3), b, std::span(&p, 1), Family::SpaceTime, cfg, SolverOptions{});
  for (std::size_t n = 0; n < 3; ++n) {
    double change = 0.0;
    for (std::size_t i = 0; i < ma.solutions[n].size(); ++i)
      change = std::max(change, std::abs(ma.solutions[n][i] - mb.solutions[n][i]));
    CHECK(change > 1e-6);
    PreviousSlab pa, pb;
    if (n > 0) {
      pa = {&ma.slabs[n - 1].disc, ma.solutions[n - 1]};
      pb = {&mb.slabs[n - 1].disc, mb.solutions[n - 1]};
    }
    const AssemblyResult ra = assemble_slab(ma.slabs[n], a, cfg, pa);
    const AssemblyResult rb = assemble_slab(mb.slabs[n], b, cfg, pb);
    CHECK(bit_identical(ra.matrix, rb.matrix));
  }
}

TEST_CASE("one slab is one assemble and solve") {
  const PolytopicMesh mesh = agglomerate(testing::two_square_strip(), {0, 0, 1, 1});
  const SpaceTimeCoefficients st = drifting_heat();
  const int p = 1;
  const AssemblyConfig cfg;
  const MarchResult m =
      march(mesh, TimePartition::uniform(0.5, 1), st, std::span(&p, 1), Family::SpaceTime, cfg, SolverOptions{});
  const SlabMesh slab = slab_of(mesh, 0.0, 0.5, p, Family::SpaceTime);
  const AssemblyResult r = assemble_slab(slab, st, cfg, PreviousSlab{});
  const SolverResult s = solve(r.matrix, r.load, slab.disc.offsets, SolverOptions{});
  REQUIRE(m.solutions.size() == 1);
  CHECK(m.solutions[0] == s.x);
}

TEST_CASE("previous values") {
  const PolytopicMesh mesh = unit_square_element();
  SpaceTimeCoefficients st;
  st.spatial_dim = 2;
  st.initial = [](const Vec& x) { return x[0] + 2 * x[1]; };
  CHECK(previous_value(PreviousSlab{}, st, 0, Vec{0.25, 0.5, 0.0}) == doctest::Approx(1.25));

  const SlabMesh prev = slab_of(mesh, 0.0, 0.5, 0, Family::TotalDegree);
  const std::vector<double> u{std::sqrt(0.5)};  // constant 1 on a prism of volume 0.5
  CHECK(previous_value(PreviousSlab{&prev.disc, u}, st, 0, Vec{0.1, 0.9, 0.5}) == doctest::Approx(1.0));

  const SlabMesh next = slab_of(mesh, 0.5, 1.0, 1, Family::TotalDegree);
  const std::vector<double> wrong(3, 0.0);
  CHECK_THROWS_AS(assemble_slab(next, st, AssemblyConfig{}, PreviousSlab{&prev.disc, wrong}), std::invalid_argument);
}

TEST_CASE("solution files are little-endian with a count header") {
  const auto path = std::filesystem::temp_directory_path() / "polydg_test_solution.bin";
  const std::vector<double> v{1.5, -2.25, 1e-300, 3.0};
  write_solution_binary(path, v);
  CHECK(std::filesystem::file_size(path) == 8 + 4 * 8);
  std::ifstream in(path, std::ios::binary);
  unsigned char head[8];
  in.read(reinterpret_cast<char*>(head), 8);
  CHECK(head[0] == 4);
  for (int i = 1; i < 8; ++i) CHECK(head[i] == 0);
  unsigned char first[8];
  in.read(reinterpret_cast<char*>(first), 8);
  // 1.5 = 0x3FF8000000000000
  CHECK(first[7] == 0x3F);
  CHECK(first[6] == 0xF8);
  CHECK(read_solution_binary(path) == v);
}
