#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "maglim/lattice.hpp"

using namespace maglim;

TEST_CASE("critical point value") {
  CHECK(std::exp(-2.0 * beta_c()) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
}

TEST_CASE("renormalization factor") {
  CHECK(renormalization_factor(1.0) == 1.0);
  CHECK(renormalization_factor(0.25) == doctest::Approx(std::pow(0.25, 15.0 / 8.0)));
  CHECK_THROWS_AS(renormalization_factor(0.0), std::invalid_argument);
  CHECK_THROWS_AS(renormalization_factor(-1.0), std::invalid_argument);
}

TEST_CASE("bc names round-trip") {
  for (auto bc : {BoundaryCondition::Plus, BoundaryCondition::Minus, BoundaryCondition::Free})
    CHECK(bc_from_name(bc_name(bc)) == bc);
  CHECK_THROWS_AS(bc_from_name("periodic"), std::invalid_argument);
  CHECK(bc_sign(BoundaryCondition::Plus) == 1);
  CHECK(bc_sign(BoundaryCondition::Minus) == -1);
  CHECK(bc_sign(BoundaryCondition::Free) == 0);
}

TEST_CASE("region indexing and edges") {
  LatticeRegion r = build_region(3, 2, 0.5, 1.0, 2.0);
  CHECK(r.num_sites() == 6);
  CHECK(r.num_hedges() == 4);
  CHECK(r.num_vedges() == 3);
  CHECK(r.index(2, 1) == 5);
  CHECK(r.pos_x(r.index(2, 1)) == doctest::Approx(2.0));
  CHECK(r.pos_y(r.index(2, 1)) == doctest::Approx(2.5));
  auto [a, b] = r.edge_sites(r.hedge(1, 0));
  CHECK(a == 1);
  CHECK(b == 2);
  auto [c, d] = r.edge_sites(r.vedge(2, 0));
  CHECK(c == 2);
  CHECK(d == 5);
  // corner sites have two missing neighbors, edge sites one, interior zero
  CHECK(r.boundary_bonds(r.index(0, 0)) == 2);
  CHECK(r.boundary_bonds(r.index(1, 0)) == 1);
  LatticeRegion big = build_region(3, 3, 1.0);
  CHECK(big.boundary_bonds(big.index(1, 1)) == 0);
}

TEST_CASE("unit square region") {
  LatticeRegion r = unit_square_region(8);
  CHECK(r.num_sites() == 64);
  CHECK(r.spacing() == doctest::Approx(0.125));
  CHECK(r.extent_x() == doctest::Approx(1.0));
}

TEST_CASE("h_site is derived") {
  ModelParams p = ModelParams::critical(2.0, 0.5);
  CHECK(p.h_site() == doctest::Approx(2.0 * std::pow(0.5, 15.0 / 8.0)));
  CHECK(ModelParams::critical().h_site() == 0.0);
}

TEST_CASE("masks") {
  LatticeRegion r = build_region(4, 4, 0.25);
  RegionMask full = full_mask(r);
  CHECK(full.count() == 16);
  RegionMask half = rect_mask(r, PhysRect{0.0, 0.0, 0.5, 1.0});
  CHECK(half.count() == 8);
  auto [ring, hole] = annulus_masks(r, PhysRect{0.0, 0.0, 1.0, 1.0},
                                    PhysRect{0.25, 0.25, 0.75, 0.75});
  CHECK(hole.count() == 4);
  CHECK(ring.count() == 12);
  CHECK_THROWS_AS(annulus_masks(r, PhysRect{0.0, 0.0, 0.5, 0.5},
                                PhysRect{0.25, 0.25, 0.75, 0.75}),
                  std::invalid_argument);
}
