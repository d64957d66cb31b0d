#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "polydg/distribute.hpp"
#include "polydg/meshgen.hpp"
#include "polydg/problems.hpp"
#include "polydg/quadrature.hpp"
#include "support.hpp"

using namespace polydg;

namespace {

Discretization make_disc(const PolytopicMesh& mesh, int p) { return discretize(mesh, std::span(&p, 1)); }

PdeCoefficients advection_diffusion() {
  PdeCoefficients c;
  c.dim = 2;
  c.diffusion = [](const Vec&) {
    Tensor t{};
    t[0][0] = t[1][1] = 0.3;
    return t;
  };
  c.advection = [](const Vec&) { return Vec{1.0, 0.35}; };
  c.reaction = [](const Vec&) { return 1.0; };
  c.source = [](const Vec& x) { return x[0] - x[1] * x[1]; };
  c.dirichlet = [](const Vec& x) { return x[0] + x[1]; };
  return c;
}

std::size_t work_items(const AssemblyStats& s, const std::string& kernel) {
  for (const auto& k : s.kernels)
    if (k.kernel == kernel) return k.work_items;
  return 0;
}

SparseMatrix monolithic(const Discretization& disc, const PdeCoefficients& c) {
  AssemblyConfig cfg;
  cfg.approach = Approach::Pattern;
  return assemble(disc, c, cfg).matrix;
}

}  // namespace

TEST_CASE("one part is the monolithic assembly") {
  const auto fine = unit_square_mesh(10, 0.1, 2);
  const Discretization disc = make_disc(agglomerate(fine, seeded_agglomeration(fine, 12, 5)), 2);
  const Partition part = partition_mesh(disc, 1, quadrature_cost_weights(disc));
  CHECK(part.cut_interfaces.empty());
  CHECK(part.owned[0].size() == disc.num_elements());
  const auto partials = assemble_partitions(disc, advection_diffusion(), AssemblyConfig{}, part);
  REQUIRE(partials.size() == 1);
  CHECK(partials[0].row_ranges.size() == 1);
  CHECK(bit_identical(partials[0].matrix, monolithic(disc, advection_diffusion())));
  const SparseMatrix gathered = gather_and_verify(partials, disc.num_dofs());
  CHECK(bit_identical(gathered, partials[0].matrix));
}

TEST_CASE("two-element strip split in two") {
  const Discretization disc = make_disc(agglomerate(testing::two_square_strip(), {0, 0, 1, 1}), 1);
  const Partition part = partition_mesh(disc, 2, {});
  CHECK(part.owned[0].size() == 1);
  CHECK(part.owned[1].size() == 1);
  CHECK(part.cut_interfaces.size() == 1);
  const PdeCoefficients c = advection_diffusion();
  const auto partials = assemble_partitions(disc, c, AssemblyConfig{}, part);
  const SparseMatrix full = monolithic(disc, c);
  for (const PartialMatrix& pm : partials) {
    const int e = part.owned[pm.part][0];
    REQUIRE(pm.row_ranges.size() == 1);
    CHECK(pm.row_ranges[0].first == disc.offsets[e]);
    CHECK(pm.row_ranges[0].second == disc.offsets[e + 1]);
    // Both blocks of the owner's rows are present and complete.
    CHECK(pm.matrix.nnz() == 2 * 9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 6; ++j) CHECK(pm.matrix.at(i, j) == full.at(disc.offsets[e] + i, j));
  }
  CHECK(relative_difference(gather_and_verify(partials, disc.num_dofs()), full) <= 1e-10);
}

TEST_CASE("uniform weights on a 16-element grid") {
  const auto fine = unit_square_mesh(8);
  const Discretization disc = make_disc(agglomerate(fine, block_agglomeration(fine, 4)), 1);
  REQUIRE(disc.num_elements() == 16);
  const Partition part = partition_mesh(disc, 4, std::vector<double>(16, 1.0));
  part.validate(disc);
  for (double w : part.weights) CHECK(w == 4.0);
  CHECK(part.imbalance() == 0.0);
}

TEST_CASE("cut faces are visited once per side") {
  const auto fine = unit_square_mesh(12, 0.1, 3);
  const Discretization disc = make_disc(agglomerate(fine, seeded_agglomeration(fine, 20, 3)), 1);
  const PdeCoefficients c = advection_diffusion();
  const AssemblyResult mono = assemble(disc, c, AssemblyConfig{});
  for (const int n : {2, 3, 5}) {
    const Partition part = partition_mesh(disc, n, quadrature_cost_weights(disc));
    std::size_t cut_subfaces = 0;
    for (int i : part.cut_interfaces)
      for (int f : disc.interface_faces[i]) cut_subfaces += disc.faces[f].sub_end - disc.faces[f].sub_begin;
    CHECK(cut_subfaces > 0);
    std::size_t face_items = 0, volume_items = 0;
    for (const PartialMatrix& pm : assemble_partitions(disc, c, AssemblyConfig{}, part)) {
      face_items += work_items(pm.stats, "interior") + work_items(pm.stats, "interior_cut");
      volume_items += work_items(pm.stats, "element");
    }
    CHECK(face_items == work_items(mono.stats, "interior") + cut_subfaces);
    CHECK(volume_items == work_items(mono.stats, "element"));
  }
}

TEST_CASE("gathering checks coverage and ignores part order") {
  const auto fine = unit_square_mesh(14, 0.2, 7);
  const Discretization disc = make_disc(agglomerate(fine, seeded_agglomeration(fine, 100, 7)), 1);
  const PdeCoefficients c = advection_diffusion();
  const Partition part = partition_mesh(disc, 4, quadrature_cost_weights(disc));
  auto partials = assemble_partitions(disc, c, AssemblyConfig{}, part, 2);
  std::vector<double> load;
  const SparseMatrix stacked = gather_and_verify(partials, disc.num_dofs(), &load);
  const AssemblyResult full = assemble(disc, c, AssemblyConfig{});
  CHECK(relative_difference(stacked, full.matrix) <= 1e-12);
  CHECK(load == full.load);

  std::mt19937 rng(3);
  std::shuffle(partials.begin(), partials.end(), rng);
  CHECK(bit_identical(gather_and_verify(partials, disc.num_dofs()), stacked));

  auto missing = partials;
  missing.pop_back();
  CHECK_THROWS_AS(gather_and_verify(missing, disc.num_dofs()), std::invalid_argument);
  auto doubled = partials;
  doubled.push_back(partials.front());
  CHECK_THROWS_AS(gather_and_verify(doubled, disc.num_dofs()), std::invalid_argument);
}

TEST_CASE("parts are independent of assembly order and concurrency") {
  const auto fine = unit_square_mesh(12, 0.1, 1);
  const Discretization disc = make_disc(agglomerate(fine, seeded_agglomeration(fine, 30, 1)), 2);
  const Partition part = partition_mesh(disc, 6, quadrature_cost_weights(disc));
  const PdeCoefficients c = advection_diffusion();
  const auto serial = assemble_partitions(disc, c, AssemblyConfig{}, part, 1);
  const auto concurrent = assemble_partitions(disc, c, AssemblyConfig{}, part, 4);
  AssemblyConfig cfg;
  const FaceSetup setup = prepare_faces(disc, c, cfg);
  for (int k = 5; k >= 0; --k) {
    const PartialMatrix alone = assemble_partition(disc, c, cfg, setup, part, k);
    CHECK(bit_identical(alone.matrix, serial[k].matrix));
    CHECK(bit_identical(concurrent[k].matrix, serial[k].matrix));
    CHECK(alone.load == serial[k].load);
  }
}

TEST_CASE("partitioner behaviour") {
  const auto fine = unit_square_mesh(16, 0.1, 4);
  const Discretization disc = make_disc(agglomerate(fine, seeded_agglomeration(fine, 60, 4)), 1);
  const auto w = quadrature_cost_weights(disc);
  const Partition a = partition_mesh(disc, 8, w);
  const Partition b = partition_mesh(disc, 8, w);
  CHECK(a.part == b.part);
  a.validate(disc);
  CHECK(a.imbalance() <= 0.1);
  CHECK_THROWS_AS(partition_mesh(disc, 61, w), std::invalid_argument);

  Partition broken = a;
  broken.cut_interfaces.pop_back();
  CHECK_THROWS_AS(broken.validate(disc), std::invalid_argument);
}

TEST_CASE("quadrature cost weights") {
  const PolytopicMesh mesh = agglomerate(testing::two_triangle_square(), {0, 0});
  const Discretization disc = make_disc(mesh, 2);
  const auto w = quadrature_cost_weights(disc, 2);
  // two triangles x (order 6 rule) x 6^2
  CHECK(w[0] == 2.0 * simplex_rule(2, 6).size() * 36.0);
}

TEST_CASE("partition and partial files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "polydg_test_distribute";
  std::filesystem::create_directories(dir);
  const auto fine = unit_square_mesh(6);
  const Discretization disc = make_disc(agglomerate(fine, seeded_agglomeration(fine, 9, 2)), 1);
  const Partition part = partition_mesh(disc, 3, {});
  write_partition_map(dir / "parts.txt", part);
  CHECK(read_partition_map(dir / "parts.txt") == part.part);
  const auto partials = assemble_partitions(disc, advection_diffusion(), AssemblyConfig{}, part);
  write_partial(dir / "p1", partials[1]);
  const PartialMatrix back = read_partial(dir / "p1");
  CHECK(back.part == 1);
  CHECK(back.row_ranges == partials[1].row_ranges);
  CHECK(bit_identical(back.matrix, partials[1].matrix));
}
