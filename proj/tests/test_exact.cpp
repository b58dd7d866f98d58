#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <fstream>
#include <sstream>

#include "maglim/exact.hpp"

using namespace maglim;

TEST_CASE("single site free with field") {
  LatticeRegion r = build_region(1, 1, 1.0);
  double h = 0.7;
  ExactDistribution d = enumerate_ising(r, BoundaryCondition::Free, ModelParams::critical(h, 1.0));
  REQUIRE(d.spin_sums.size() == 2);
  double z = std::exp(h) + std::exp(-h);
  CHECK(d.prob_of(1) == doctest::Approx(std::exp(h) / z).epsilon(1e-14));
  CHECK(d.prob_of(-1) == doctest::Approx(std::exp(-h) / z).epsilon(1e-14));
  CHECK(d.mean() == doctest::Approx(std::tanh(h)).epsilon(1e-14));
}

TEST_CASE("single site plus bc no field") {
  // four boundary bonds of strength beta_c
  LatticeRegion r = build_region(1, 1, 1.0);
  ExactDistribution d = enumerate_ising(r, BoundaryCondition::Plus, ModelParams::critical());
  double b = 4.0 * beta_c();
  CHECK(d.prob_of(1) == doctest::Approx(std::exp(b) / (std::exp(b) + std::exp(-b))).epsilon(1e-14));
}

TEST_CASE("plus and minus laws are mirrors at h = 0") {
  LatticeRegion r = build_region(3, 2, 1.0);
  ModelParams p = ModelParams::critical();
  ExactDistribution dp = enumerate_ising(r, BoundaryCondition::Plus, p);
  ExactDistribution dm = enumerate_ising(r, BoundaryCondition::Minus, p);
  for (size_t i = 0; i < dp.spin_sums.size(); ++i)
    CHECK(dp.probs[i] == doctest::Approx(dm.prob_of(-dp.spin_sums[i])).epsilon(1e-12));
  ExactDistribution df = enumerate_ising(r, BoundaryCondition::Free, p);
  CHECK(df.mean() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("probabilities sum to one") {
  LatticeRegion r = build_region(3, 3, 0.5);
  for (auto bc : {BoundaryCondition::Plus, BoundaryCondition::Minus, BoundaryCondition::Free}) {
    ExactDistribution d = enumerate_ising(r, bc, ModelParams::critical(0.3, 0.5));
    double sum = 0;
    for (double p : d.probs) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("region size cap") {
  CHECK_THROWS_AS(enumerate_ising(build_region(5, 5, 1.0), BoundaryCondition::Free,
                                  ModelParams::critical()),
                  std::invalid_argument);
}

TEST_CASE("mgf and charfn basics") {
  LatticeRegion r = build_region(2, 2, 0.5);
  ExactDistribution d = enumerate_ising(r, BoundaryCondition::Free, ModelParams::critical());
  CHECK(exact_log_mgf(d, 0.0) == doctest::Approx(0.0));
  CHECK(exact_mgf(d, 1.3) == doctest::Approx(std::exp(exact_log_mgf(d, 1.3))));
  CHECK(std::abs(exact_charfn(d, 0.0) - std::complex<double>(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(exact_charfn(d, 2.1)) <= 1.0 + 1e-14);
  // free bc at h = 0 is symmetric, so the charfn is real
  CHECK(exact_charfn(d, 2.1).imag() == doctest::Approx(0.0).epsilon(1e-14));
  // mgf dominates: log E[e^{tm}] >= t E[m]
  CHECK(exact_log_mgf(d, 2.0) >= 2.0 * d.mean_mag() - 1e-12);
}

TEST_CASE("distribution file round trip") {
  LatticeRegion r = build_region(3, 2, 0.5);
  ModelParams p = ModelParams::critical(0.3, 0.5);
  ExactDistribution d = enumerate_ising(r, BoundaryCondition::Plus, p);
  std::stringstream ss;
  write_distribution(ss, d, r, p);
  ExactDistribution back = read_distribution(ss);
  REQUIRE(back.spin_sums == d.spin_sums);
  CHECK(back.a == doctest::Approx(d.a));
  CHECK(back.bc == d.bc);
  for (size_t i = 0; i < d.probs.size(); ++i)
    CHECK(back.probs[i] == doctest::Approx(d.probs[i]).epsilon(1e-12));
}

TEST_CASE("committed fixture matches enumeration") {
  std::ifstream in(std::string(MAGLIM_DATA_DIR) + "/exact_3x3_plus_h0.tsv");
  REQUIRE(in.good());
  ExactDistribution fixture = read_distribution(in);
  ExactDistribution live = enumerate_ising(build_region(3, 3, 1.0), BoundaryCondition::Plus,
                                           ModelParams::critical());
  REQUIRE(fixture.spin_sums == live.spin_sums);
  for (size_t i = 0; i < live.probs.size(); ++i)
    CHECK(fixture.probs[i] == doctest::Approx(live.probs[i]).epsilon(1e-12));
}

TEST_CASE("FK measure reproduces the spin law via Edwards-Sokal") {
  // kept within the edge-count ceiling: wired bcs carry one boundary edge per
  // missing neighbor, so the field cases use a 1x2 strip
  struct Case {
    int w, h;
    BoundaryCondition bc;
    double field;
  };
  for (Case c : {Case{2, 2, BoundaryCondition::Plus, 0.0},
                 Case{2, 2, BoundaryCondition::Minus, 0.0},
                 Case{2, 2, BoundaryCondition::Free, 0.0},
                 Case{2, 2, BoundaryCondition::Free, 0.5},
                 Case{1, 2, BoundaryCondition::Plus, 0.5},
                 Case{1, 2, BoundaryCondition::Minus, 0.5}}) {
    LatticeRegion r = build_region(c.w, c.h, 1.0);
    ModelParams p = ModelParams::critical(c.field, 1.0);
    FkExactMeasure fk = enumerate_fk(r, c.bc, p);
    ExactDistribution via_fk = fk.spin_marginal();
    ExactDistribution direct = enumerate_ising(r, c.bc, p);
    REQUIRE(via_fk.spin_sums == direct.spin_sums);
    for (size_t i = 0; i < direct.probs.size(); ++i)
      CHECK(via_fk.probs[i] == doctest::Approx(direct.probs[i]).epsilon(1e-10));
  }
}

TEST_CASE("FK config probabilities are a distribution") {
  LatticeRegion r = build_region(2, 2, 1.0);
  LatticeRegion strip = build_region(1, 2, 1.0);
  FkExactMeasure fk =
      enumerate_fk(strip, BoundaryCondition::Minus, ModelParams::critical(0.4, 1.0));
  double sum = 0;
  for (double p : fk.config_probs) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  for (int e = 0; e < fk.num_edges(); ++e) {
    double m = fk.edge_marginal(e);
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
  }
}

TEST_CASE("ghost mass grows with the field") {
  LatticeRegion r = build_region(2, 2, 1.0);
  FkExactMeasure lo = enumerate_fk(r, BoundaryCondition::Free, ModelParams::critical(0.2, 1.0));
  FkExactMeasure hi = enumerate_fk(r, BoundaryCondition::Free, ModelParams::critical(1.0, 1.0));
  CHECK(hi.mean_ghost_mass() > lo.mean_ghost_mass());
  FkExactMeasure zero = enumerate_fk(r, BoundaryCondition::Free, ModelParams::critical());
  CHECK(zero.mean_ghost_mass() == doctest::Approx(0.0));
}
