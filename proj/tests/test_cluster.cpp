#include <doctest.h>

#include <stdexcept>

#include <sstream>

#include "maglim/cluster.hpp"
#include "maglim/rng.hpp"

using namespace maglim;

namespace {

FkConfig empty_fk(const LatticeRegion& r, bool wired = false) {
  FkConfig fk;
  fk.open.assign(r.num_edges(), 0);
  fk.tau.assign(r.num_sites(), 0);
  fk.bnd.assign(r.num_sites(), 0);
  fk.wired = wired;
  return fk;
}

// Opens the ring of edges along the outermost sites of the region.
void open_boundary_ring(FkConfig& fk, const LatticeRegion& r) {
  int W = r.width(), H = r.height();
  for (int i = 0; i + 1 < W; ++i) {
    fk.open[r.hedge(i, 0)] = 1;
    fk.open[r.hedge(i, H - 1)] = 1;
  }
  for (int j = 0; j + 1 < H; ++j) {
    fk.open[r.vedge(0, j)] = 1;
    fk.open[r.vedge(W - 1, j)] = 1;
  }
}

}  // namespace

TEST_CASE("decompose labels, sizes and flags") {
  LatticeRegion r = build_region(3, 3, 0.5);
  FkConfig fk = empty_fk(r, true);
  fk.open[r.hedge(0, 0)] = 1;  // sites 0-1
  fk.open[r.vedge(1, 0)] = 1;  // sites 1-4
  fk.tau[8] = 1;               // site 8 to ghost
  fk.bnd[6] = 1;               // site 6 to boundary
  ClusterDecomposition d = decompose(fk, r, 0.5);
  CHECK(d.label[0] == 0);
  CHECK(d.label[1] == 0);
  CHECK(d.label[4] == 0);
  CHECK(d.cluster_of(0).size == 3);
  CHECK(d.cluster_of(0).area == doctest::Approx(3.0 * renormalization_factor(0.5)));
  CHECK(d.cluster_of(8).ghost);
  CHECK_FALSE(d.cluster_of(8).touches_boundary);
  CHECK(d.cluster_of(6).touches_boundary);
  CHECK_FALSE(d.cluster_of(0).ghost);
  CHECK(ghost_connected_mass(d) == doctest::Approx(renormalization_factor(0.5)));
  // bounding box of the 3-site cluster
  CHECK(d.cluster_of(0).min_i == 0);
  CHECK(d.cluster_of(0).max_i == 1);
  CHECK(d.cluster_of(0).max_j == 1);
}

TEST_CASE("unwired config ignores boundary bonds") {
  LatticeRegion r = build_region(2, 2, 1.0);
  FkConfig fk = empty_fk(r, false);
  fk.bnd[0] = 1;
  ClusterDecomposition d = decompose(fk, r, 1.0);
  CHECK_FALSE(d.cluster_of(0).touches_boundary);
}

TEST_CASE("open circuit around a hole") {
  LatticeRegion r = build_region(4, 4, 1.0);
  AnnulusSpec ann = AnnulusSpec::centered(r, 4, 2);
  CHECK_FALSE(ann.degenerate());
  FkConfig fk = empty_fk(r);
  CHECK_FALSE(open_circuit(fk, r, ann));
  open_boundary_ring(fk, r);
  CHECK(open_circuit(fk, r, ann));
  auto sites = open_circuit_sites(fk, r, ann);
  CHECK(sites.size() == 12);  // the full outer ring winds
  // breaking one ring edge leaves a connected arc but no circuit
  fk.open[r.hedge(1, 0)] = 0;
  CHECK_FALSE(open_circuit(fk, r, ann));
  CHECK(open_circuit_sites(fk, r, ann).empty());
}

TEST_CASE("dual circuit when all primal edges are closed") {
  LatticeRegion r = build_region(4, 4, 1.0);
  AnnulusSpec ann = AnnulusSpec::centered(r, 4, 2);
  FkConfig fk = empty_fk(r);
  CHECK(dual_circuit(fk, r, ann));
  // a fully open configuration has no dual circuit
  for (auto& e : fk.open) e = 1;
  CHECK_FALSE(dual_circuit(fk, r, ann));
}

TEST_CASE("open circuit and dual radial crossing are complementary") {
  LatticeRegion r = build_region(6, 6, 1.0);
  AnnulusSpec ann = AnnulusSpec::centered(r, 6, 2);
  CounterRng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    FkConfig fk = empty_fk(r);
    for (auto& e : fk.open) e = rng.bernoulli(0.5);
    CHECK(open_circuit(fk, r, ann) == !dual_radial_crossing(fk, r, ann));
  }
}

TEST_CASE("degenerate annulus") {
  LatticeRegion r = build_region(4, 4, 1.0);
  AnnulusSpec ann = AnnulusSpec::centered(r, 4, 4);
  CHECK(ann.degenerate());
  FkConfig fk = empty_fk(r);
  open_boundary_ring(fk, r);
  CHECK_FALSE(open_circuit(fk, r, ann));
  CHECK_FALSE(dual_circuit(fk, r, ann));
}

TEST_CASE("rect crossing") {
  LatticeRegion r = build_region(4, 3, 1.0);
  FkConfig fk = empty_fk(r);
  CHECK_FALSE(rect_crossing(fk, r, 0, 0, 4, 3));
  for (int i = 0; i + 1 < 4; ++i) fk.open[r.hedge(i, 1)] = 1;
  CHECK(rect_crossing(fk, r, 0, 0, 4, 3));
  fk.open[r.hedge(1, 1)] = 0;
  CHECK_FALSE(rect_crossing(fk, r, 0, 0, 4, 3));
}

TEST_CASE("annulus events report ghost connection") {
  LatticeRegion r = build_region(4, 4, 1.0);
  AnnulusSpec ann = AnnulusSpec::centered(r, 4, 2);
  FkConfig fk = empty_fk(r);
  open_boundary_ring(fk, r);
  AnnulusEventReport ev = annulus_events(fk, r, ann);
  CHECK(ev.open_circuit_present);
  CHECK_FALSE(ev.circuit_ghost_connected);
  fk.tau[0] = 1;  // corner site carries the circuit
  ev = annulus_events(fk, r, ann);
  CHECK(ev.circuit_ghost_connected);
}

TEST_CASE("mesoscopic scan counts interior clusters in the mass window") {
  LatticeRegion r = build_region(8, 8, 1.0);
  FkConfig fk = empty_fk(r);
  // 2x2 cluster strictly inside the (0,0) eps-square of side 4
  fk.open[r.hedge(1, 1)] = 1;
  fk.open[r.hedge(1, 2)] = 1;
  fk.open[r.vedge(1, 1)] = 1;
  fk.open[r.vedge(2, 1)] = 1;
  CHECK(mesoscopic_scan(fk, r, 1.0, 4.0, 10.0) == 1);
  // attach the cluster to the square's outer layer: no longer interior
  fk.open[r.hedge(0, 1)] = 1;
  CHECK(mesoscopic_scan(fk, r, 1.0, 4.0, 10.0) == 0);
  CHECK_THROWS_AS(mesoscopic_scan(fk, r, 1.0, 3.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(mesoscopic_scan(fk, r, 1.0, 4.0, 0.5), std::invalid_argument);
}

TEST_CASE("cluster summary rows") {
  LatticeRegion r = build_region(2, 2, 1.0);
  FkConfig fk = empty_fk(r);
  fk.open[r.hedge(0, 0)] = 1;
  std::ostringstream os;
  write_cluster_summary(os, 7, decompose(fk, r, 1.0));
  CHECK(os.str() == "7,0,2,2,0,0\n7,2,1,1,0,0\n7,3,1,1,0,0\n");
}
