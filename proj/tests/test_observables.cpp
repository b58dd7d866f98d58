#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "maglim/exact.hpp"
#include "maglim/observables.hpp"

using namespace maglim;

TEST_CASE("block magnetization and pair field") {
  LatticeRegion r = build_region(2, 2, 0.5);
  SpinConfig s;
  s.spins = {1, -1, 1, 1};
  RegionMask mask = full_mask(r);
  double rn = renormalization_factor(0.5);
  CHECK(block_magnetization(s, mask, 0.5) == doctest::Approx(2.0 * rn));
  std::vector<double> f{1.0, 2.0, 3.0, 4.0};
  CHECK(pair_field(s, f, 0.5) == doctest::Approx(rn * (1.0 - 2.0 + 3.0 + 4.0)));
  CHECK_THROWS_AS(pair_field(s, std::vector<double>{1.0}, 0.5), std::invalid_argument);
  // pair field against the all-ones function is the block magnetization
  CHECK(pair_field(s, std::vector<double>(4, 1.0), 0.5) ==
        doctest::Approx(block_magnetization(s, mask, 0.5)));
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  auto gl = gauss_legendre_unit(5);
  REQUIRE(gl.size() == 5);
  double wsum = 0.0;
  for (auto [x, w] : gl) {
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    wsum += w;
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
  // degree-9 polynomial x^9: integral over [0,1] = 0.1
  double acc = 0.0;
  for (auto [x, w] : gl) acc += w * std::pow(x, 9);
  CHECK(acc == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(gauss_legendre_unit(0), std::invalid_argument);
}

TEST_CASE("charfn estimators at t = 0") {
  std::vector<double> m{0.3, -0.2, 0.7};
  ComplexEstimate e = charfn_naive(m, 0.0);
  CHECK(e.value.real() == doctest::Approx(1.0));
  CHECK(e.value.imag() == doctest::Approx(0.0));
}

TEST_CASE("fk product term structure") {
  // hand-built decomposition: one ghost cluster (area 2), one boundary cluster
  // (area 3), one free cluster (area 1.5)
  ClusterDecomposition d;
  d.a = 1.0;
  ClusterInfo g;
  g.label = 0;
  g.area = 2.0;
  g.ghost = true;
  ClusterInfo b;
  b.label = 1;
  b.area = 3.0;
  b.touches_boundary = true;
  ClusterInfo f;
  f.label = 2;
  f.area = 1.5;
  d.clusters = {g, b, f};
  double t = 0.8;
  auto plus = charfn_fk_term(d, BoundaryCondition::Plus, t);
  // pinned phase (2 + 3) t, free factor cos(1.5 t)
  std::complex<double> want =
      std::cos(1.5 * t) * std::exp(std::complex<double>(0.0, 5.0 * t));
  CHECK(std::abs(plus - want) < 1e-13);
  auto minus = charfn_fk_term(d, BoundaryCondition::Minus, t);
  std::complex<double> want_m =
      std::cos(1.5 * t) * std::exp(std::complex<double>(0.0, (2.0 - 3.0) * t));
  CHECK(std::abs(minus - want_m) < 1e-13);
  // free bc with no pinned clusters: purely real product
  ClusterDecomposition dfree;
  dfree.a = 1.0;
  ClusterInfo c1;
  c1.label = 0;
  c1.area = 1.0;
  ClusterInfo c2;
  c2.label = 1;
  c2.area = 2.5;
  dfree.clusters = {c1, c2};
  auto fr = charfn_fk_term(dfree, BoundaryCondition::Free, t);
  CHECK(fr.imag() == doctest::Approx(0.0));
  CHECK(fr.real() == doctest::Approx(std::cos(t) * std::cos(2.5 * t)));
}

TEST_CASE("combine chain series") {
  std::vector<std::vector<double>> chains{{1.0, 1.2, 0.8, 1.1, 0.9, 1.0},
                                          {2.0, 2.1, 1.9, 2.0, 2.05, 1.95}};
  Estimate e = combine_chain_series(chains);
  CHECK(e.value == doctest::Approx(1.5).epsilon(0.01));
  CHECK(e.n == 12);
  CHECK(e.error > 0.0);
}

TEST_CASE("thermodynamic integration matches exact log-mgf on 2x2") {
  LatticeRegion r = build_region(2, 2, 1.0);
  ExactDistribution d = enumerate_ising(r, BoundaryCondition::Plus, ModelParams::critical());
  double t = 1.0;
  TiSpec spec;
  spec.plan.n_meas = 4000;
  spec.plan.n_chains = 2;
  spec.plan.thin = 2;
  spec.nodes = 8;
  Estimate got = log_mgf_ti(t, BoundaryCondition::Plus, r, 1.0, spec);
  double want = exact_log_mgf(d, t);
  CHECK(std::fabs(got.value - want) < std::max(4.0 * got.error, 0.02));
  CHECK(log_mgf_ti(0.0, BoundaryCondition::Plus, r, 1.0, spec).value == 0.0);
  CHECK_THROWS_AS(log_mgf_ti(-1.0, BoundaryCondition::Plus, r, 1.0, spec),
                  std::invalid_argument);
}

TEST_CASE("free energy curve shape") {
  TiSpec spec;
  spec.plan.n_meas = 500;
  spec.plan.n_chains = 2;
  spec.nodes = 4;
  FreeEnergyCurve c =
      free_energy_curve(BoundaryCondition::Plus, 4, 1.0, {0.5, 1.0, 2.0}, spec);
  REQUIRE(c.values.size() == 3);
  CHECK(c.side == doctest::Approx(4.0));
  // f is increasing in t for Plus bc (positive mean magnetization)
  CHECK(c.values[0] > 0.0);
  CHECK(c.values[1] > c.values[0]);
  CHECK(c.values[2] > c.values[1]);
  CHECK_THROWS_AS(
      free_energy_curve(BoundaryCondition::Plus, 4, 1.0, {1.0, 0.5}, spec),
      std::invalid_argument);
}

TEST_CASE("ghs second differences on a measured grid") {
  LatticeRegion r = build_region(4, 4, 1.0);
  SamplingPlan plan;
  plan.n_meas = 2000;
  plan.n_chains = 2;
  GhsReport rep = ghs_concavity_check(BoundaryCondition::Plus, r, 1.0,
                                      {0.0, 0.25, 0.5, 0.75, 1.0}, plan);
  REQUIRE(rep.second_diffs.size() == 3);
  CHECK(rep.concave_within(4.0));
  // magnetization increases with the field
  CHECK(rep.means.back().value > rep.means.front().value);
  CHECK_THROWS_AS(ghs_concavity_check(BoundaryCondition::Plus, r, 1.0, {0.5, 0.25}, plan),
                  std::invalid_argument);
}
