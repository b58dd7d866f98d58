#pragma once

#include <cstdint>
#include <vector>

namespace maglim {

// Monte Carlo time series reduced to mean, error and autocorrelation.
struct SeriesStats {
  int64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance
  double tau_int = 0.5;   // integrated autocorrelation time
  double std_error = 0.0; // sqrt(2 tau_int variance / count)
  std::vector<double> binning;  // naive stderr per doubling bin level

  static SeriesStats from_series(const std::vector<double>& xs);
};

// Streaming mean/M2 accumulator with associative merge, for combining
// partitioned per-chain accumulators.
struct RunningMoments {
  int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
  }
  void merge(const RunningMoments& o) {
    if (o.n == 0) return;
    if (n == 0) { *this = o; return; }
    double d = o.mean - mean;
    int64_t tot = n + o.n;
    mean += d * double(o.n) / double(tot);
    m2 += o.m2 + d * d * double(n) * double(o.n) / double(tot);
    n = tot;
  }
  double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
  double naive_stderr() const;
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  int64_t n = 0;
  bool flagged = false;  // unreliable (e.g. unstable tau_int)
};

// Upper tail of the chi-square distribution, P(X >= x) with k dof.
double chi_square_tail(double x, int dof);

// Pearson chi-square test of observed counts against expected probabilities;
// bins with expected count below `min_expected` are pooled. Returns p-value.
double chi_square_test(const std::vector<int64_t>& observed,
                       const std::vector<double>& expected_probs,
                       double min_expected = 5.0);

// Total-variation distance between an empirical distribution (counts) and
// exact probabilities over the same support.
double total_variation(const std::vector<int64_t>& observed,
                       const std::vector<double>& expected_probs);

}  // namespace maglim
