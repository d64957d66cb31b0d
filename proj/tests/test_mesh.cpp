#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "polydg/mesh.hpp"
#include "polydg/meshgen.hpp"
#include "support.hpp"

using namespace polydg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "polydg_test_mesh";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

double total_volume(const PolytopicMesh& m) {
  double v = 0.0;
  for (const auto& e : m.elements) v += e.volume;
  return v;
}

int count_boundary(const PolytopicMesh& m) {
  int n = 0;
  for (const auto& f : m.faces) n += f.is_boundary();
  return n;
}

}  // namespace

TEST_CASE("loading the two-triangle unit square") {
  const auto p = scratch("square.mesh");
  write_text(p, "2 4 2\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n");
  const SimplicialMesh m = load_simplicial_mesh(p);
  CHECK(m.vertices.size() == 4);
  REQUIRE(m.num_simplices() == 2);
  CHECK(m.simplex_volume(0) == doctest::Approx(0.5));
  CHECK(m.simplex_volume(1) == doctest::Approx(0.5));
}

TEST_CASE("loading the unit tetrahedron and reorienting it") {
  const auto p = scratch("tet.mesh");
  write_text(p, "3 4 1\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n0 2 1 3\n");
  const SimplicialMesh m = load_simplicial_mesh(p);
  REQUIRE(m.num_simplices() == 1);
  CHECK(m.simplex_volume(0) == doctest::Approx(1.0 / 6.0));
  const auto v = m.simplex_vertices(0);
  CHECK(signed_simplex_volume(std::span(v.data(), 4), 3) > 0.0);
}

TEST_CASE("mesh file errors") {
  const auto p = scratch("bad.mesh");
  write_text(p, "2 3 1\n0 0\n1 0\n0 1\n0 1 1\n");
  CHECK_THROWS_AS(load_simplicial_mesh(p), MeshError);
  write_text(p, "2 3 1\n0 0\n1 zero\n0 1\n0 1 2\n");
  try {
    load_simplicial_mesh(p);
    FAIL("expected a parse error");
  } catch (const MeshError& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
  CHECK_THROWS(load_simplicial_mesh(scratch("missing.mesh")));
}

TEST_CASE("mesh and map round trip") {
  const SimplicialMesh m = unit_cube_mesh(2, 0.2, 5);
  const auto p = scratch("cube.mesh");
  write_simplicial_mesh(p, m);
  const SimplicialMesh r = load_simplicial_mesh(p);
  REQUIRE(r.num_simplices() == m.num_simplices());
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(r.vertices[i][k] == m.vertices[i][k]);
  const auto map = seeded_agglomeration(m, 5, 3);
  write_agglomeration_map(scratch("cube.agg"), map);
  CHECK(load_agglomeration_map(scratch("cube.agg"), m.num_simplices()) == map);
  CHECK_THROWS(load_agglomeration_map(scratch("cube.agg"), m.num_simplices() + 1));
}

TEST_CASE("single-element agglomeration drops the diagonal") {
  const PolytopicMesh m = agglomerate(testing::two_triangle_square(), {0, 0});
  REQUIRE(m.num_elements() == 1);
  CHECK(m.faces.size() == 4);
  CHECK(count_boundary(m) == 4);
  CHECK(m.interfaces.empty());
  CHECK(m.elements[0].volume == doctest::Approx(1.0));
  CHECK(subdivision_for_quadrature(m, 0).size() == 2);
  CHECK(m.elements[0].box.lo[0] == 0.0);
  CHECK(m.elements[0].box.hi[1] == 1.0);
}

TEST_CASE("two elements share one interface") {
  const PolytopicMesh m = agglomerate(testing::two_triangle_square(), {0, 1});
  REQUIRE(m.num_elements() == 2);
  REQUIRE(m.interfaces.size() == 1);
  CHECK(m.interfaces[0].face_ids.size() == 1);
  const Face& f = m.faces[m.interfaces[0].face_ids[0]];
  CHECK(!f.is_boundary());
  CHECK(f.measure == doctest::Approx(std::sqrt(2.0)));
  CHECK(count_boundary(m) == 4);
}

TEST_CASE("identity agglomeration keeps one simplex per element") {
  const SimplicialMesh fine = unit_square_mesh(4);
  const PolytopicMesh m = identity_agglomeration(fine);
  CHECK(m.num_elements() == fine.num_simplices());
  for (std::size_t e = 0; e < m.num_elements(); ++e) CHECK(subdivision_for_quadrature(m, e).size() == 1);
  // n x n cut squares have 4n boundary edges and 3n^2 - 2n interior ones.
  CHECK(count_boundary(m) == 16);
  CHECK(m.faces.size() - 16 == 3 * 16 - 8);
  CHECK(m.interfaces.size() == m.faces.size() - 16);
}

TEST_CASE("coplanar boundary edges merge into one face") {
  const PolytopicMesh m = agglomerate(testing::two_square_strip(), {0, 0, 0, 0});
  REQUIRE(m.num_elements() == 1);
  CHECK(m.faces.size() == 4);
  int two_segment_faces = 0;
  double perimeter = 0.0;
  for (const Face& f : m.faces) {
    double sum = 0.0;
    for (std::size_t s = 0; s < face_subdivision(f).size(); ++s) sum += sub_face_measure(m, f, s);
    CHECK(std::abs(sum - f.measure) < 1e-12 * f.measure);
    two_segment_faces += face_subdivision(f).size() == 2;
    perimeter += f.measure;
  }
  CHECK(two_segment_faces == 2);
  CHECK(perimeter == doctest::Approx(6.0));
}

TEST_CASE("an interface may hold several faces") {
  const PolytopicMesh m = testing::u_shaped_mesh();
  REQUIRE(m.num_elements() == 3);
  const Interface* i01 = nullptr;
  for (const auto& i : m.interfaces)
    if (i.owner == 0 && i.neighbor == 1) i01 = &i;
  REQUIRE(i01 != nullptr);
  CHECK(i01->face_ids.size() == 3);
  for (int f : i01->face_ids) {
    CHECK(m.faces[f].measure == doctest::Approx(1.0 / 3.0));
    CHECK(m.faces[f].interface == static_cast<int>(i01 - m.interfaces.data()));
  }
}

TEST_CASE("triangle facet of a tetrahedron is its own sub-face") {
  const PolytopicMesh m = identity_agglomeration(
      make_simplicial_mesh(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2, 3}}));
  REQUIRE(m.faces.size() == 4);
  for (const Face& f : m.faces) CHECK(face_subdivision(f).size() == 1);
}

TEST_CASE("mesh errors on bad maps") {
  const SimplicialMesh fine = testing::two_triangle_square();
  CHECK_THROWS_AS(agglomerate(fine, {0, 2}), MeshError);
  // Two cells touching only at a vertex are not facet-connected.
  const SimplicialMesh grid = unit_square_mesh(2);
  std::vector<int> map(grid.num_simplices(), 1);
  for (std::size_t s = 0; s < grid.num_simplices(); ++s) {
    const auto v = grid.simplex_vertices(s);
    const double cx = (v[0][0] + v[1][0] + v[2][0]) / 3, cy = (v[0][1] + v[1][1] + v[2][1]) / 3;
    if ((cx < 0.5) == (cy < 0.5)) map[s] = 0;
  }
  CHECK_THROWS_AS(agglomerate(grid, map), MeshError);
}

TEST_CASE("mesh invariants on jittered agglomerations") {
  for (int d : {2, 3}) {
    const SimplicialMesh fine = d == 2 ? unit_square_mesh(12, 0.25, 9) : unit_cube_mesh(4, 0.2, 9);
    double simplex_sum = 0.0;
    for (std::size_t s = 0; s < fine.num_simplices(); ++s) simplex_sum += fine.simplex_volume(s);
    for (const int k : {1, 7, 40}) {
      const PolytopicMesh m = agglomerate(fine, seeded_agglomeration(fine, k, 11));
      CAPTURE(d);
      CAPTURE(k);
      CHECK(m.num_elements() == static_cast<std::size_t>(k));
      CHECK(std::abs(total_volume(m) - 1.0) < 1e-12);
      CHECK(std::abs(simplex_sum - 1.0) < 1e-12);

      Vec closure{};
      double boundary_measure = 0.0;
      std::vector<int> seen(m.faces.size(), 0);
      for (std::size_t i = 0; i < m.interfaces.size(); ++i)
        for (int f : m.interfaces[i].face_ids) {
          ++seen[f];
          CHECK(m.faces[f].owner == m.interfaces[i].owner);
          CHECK(m.faces[f].neighbor == m.interfaces[i].neighbor);
          const Vec back = m.faces[f].normal_from(m.faces[f].neighbor);
          for (int c = 0; c < d; ++c) CHECK(back[c] == -m.faces[f].normal[c]);
        }
      for (std::size_t f = 0; f < m.faces.size(); ++f) {
        const Face& face = m.faces[f];
        CHECK(face.measure > 0.0);
        if (face.is_boundary()) {
          CHECK(seen[f] == 0);
          closure = axpy(face.measure, face.normal, closure);
          boundary_measure += face.measure;
        } else {
          CHECK(seen[f] == 1);
        }
      }
      CHECK(norm(closure, d) <= 1e-10 * boundary_measure);
    }
  }
}

TEST_CASE("identity agglomeration reproduces the facet graph") {
  const SimplicialMesh fine = unit_cube_mesh(2, 0.1, 2);
  const PolytopicMesh m = identity_agglomeration(fine);
  // Every tetrahedron has four facets: interior ones are counted twice.
  const std::size_t boundary = count_boundary(m);
  CHECK(4 * fine.num_simplices() == boundary + 2 * (m.faces.size() - boundary));
  CHECK(boundary == 6 * 4 * 2);
}
