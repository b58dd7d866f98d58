#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "maglim/rng.hpp"
#include "maglim/stats.hpp"

using namespace maglim;

TEST_CASE("iid series statistics") {
  CounterRng rng(5);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = rng.uniform();
  SeriesStats st = SeriesStats::from_series(xs);
  CHECK(st.mean == doctest::Approx(0.5).epsilon(0.02));
  CHECK(st.variance == doctest::Approx(1.0 / 12.0).epsilon(0.05));
  CHECK(st.tau_int == doctest::Approx(0.5).epsilon(0.3));
  CHECK(st.std_error == doctest::Approx(std::sqrt(st.variance / xs.size())).epsilon(0.3));
  CHECK(!st.binning.empty());
}

TEST_CASE("correlated series inflates tau_int") {
  CounterRng rng(6);
  std::vector<double> xs(40000);
  double prev = 0.0;
  const double rho = 0.9;
  for (auto& x : xs) {
    prev = rho * prev + std::sqrt(1 - rho * rho) * (rng.uniform() - 0.5);
    x = prev;
  }
  SeriesStats st = SeriesStats::from_series(xs);
  // AR(1): tau_int = (1+rho)/(2(1-rho)) = 9.5
  CHECK(st.tau_int == doctest::Approx(9.5).epsilon(0.25));
  CHECK(st.std_error > 2.0 * std::sqrt(st.variance / xs.size()));
}

TEST_CASE("degenerate series") {
  SeriesStats st = SeriesStats::from_series({3.0, 3.0, 3.0, 3.0});
  CHECK(st.mean == 3.0);
  CHECK(st.variance == 0.0);
  CHECK(st.std_error == 0.0);
  CHECK(SeriesStats::from_series({}).count == 0);
}

TEST_CASE("running moments merge equals bulk") {
  CounterRng rng(7);
  std::vector<double> xs(999);
  for (auto& x : xs) x = rng.uniform() * 3.0 - 1.0;
  RunningMoments all, a, b;
  for (size_t i = 0; i < xs.size(); ++i) {
    all.add(xs[i]);
    (i < 400 ? a : b).add(xs[i]);
  }
  a.merge(b);
  CHECK(a.n == all.n);
  CHECK(a.mean == doctest::Approx(all.mean).epsilon(1e-12));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("chi-square tail values") {
  // known points: P(X >= x) for k dof
  CHECK(chi_square_tail(0.0, 1) == doctest::Approx(1.0));
  CHECK(chi_square_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(chi_square_tail(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(chi_square_tail(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK_THROWS_AS(chi_square_tail(1.0, 0), std::invalid_argument);
}

TEST_CASE("chi-square test on matching and shifted counts") {
  std::vector<double> probs{0.25, 0.25, 0.25, 0.25};
  std::vector<int64_t> good{2510, 2480, 2530, 2480};
  CHECK(chi_square_test(good, probs) > 0.1);
  std::vector<int64_t> bad{3500, 1500, 2500, 2500};
  CHECK(chi_square_test(bad, probs) < 1e-10);
}

TEST_CASE("chi-square pooling of sparse bins") {
  // many near-zero-expectation bins must not blow up the statistic
  std::vector<double> probs(50, 0.0001);
  probs[0] = 1.0 - 0.0049;
  std::vector<int64_t> obs(50, 1);
  obs[0] = 9951;
  CHECK(chi_square_test(obs, probs) > 0.001);
}

TEST_CASE("total variation") {
  std::vector<double> probs{0.5, 0.5};
  CHECK(total_variation({50, 50}, probs) == doctest::Approx(0.0));
  CHECK(total_variation({100, 0}, probs) == doctest::Approx(0.5));
}

TEST_CASE("counter rng reproducibility and streams") {
  CounterRng a = CounterRng::stream(42, 0);
  CounterRng b = CounterRng::stream(42, 0);
  CounterRng c = CounterRng::stream(42, 1);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  // stateless addressing matches the sequential stream
  CounterRng d = CounterRng::stream(42, 7);
  uint64_t key = d.key();
  CHECK(d.next_u64() == CounterRng::at(key, 0));
  CHECK(d.next_u64() == CounterRng::at(key, 1));
  double u = CounterRng::uniform_at(key, 5);
  CHECK(u >= 0.0);
  CHECK(u < 1.0);
}
