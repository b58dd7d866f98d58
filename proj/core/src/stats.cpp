#include "maglim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maglim {

double RunningMoments::naive_stderr() const {
  return n > 1 ? std::sqrt(variance() / double(n)) : 0.0;
}

SeriesStats SeriesStats::from_series(const std::vector<double>& xs) {
  SeriesStats st;
  st.count = int64_t(xs.size());
  if (xs.empty()) return st;

  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= double(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var = xs.size() > 1 ? var / double(xs.size() - 1) : 0.0;
  st.mean = mean;
  st.variance = var;

  if (var <= 0.0 || xs.size() < 4) {
    st.tau_int = 0.5;
    st.std_error = std::sqrt(var / double(std::max<size_t>(xs.size(), 1)));
    return st;
  }

  // Self-consistent window: smallest W with W >= 6 tau_int(W).
  const size_t n = xs.size();
  const size_t wmax = std::min(n / 2, size_t(10000));
  double tau = 0.5;
  size_t window = wmax;
  double acc = 0.0;
  for (size_t w = 1; w <= wmax; ++w) {
    double c = 0.0;
    for (size_t i = 0; i + w < n; ++i) c += (xs[i] - mean) * (xs[i + w] - mean);
    c /= double(n - w);
    acc += c / var;
    tau = 0.5 + acc;
    if (double(w) >= 6.0 * tau) {
      window = w;
      break;
    }
  }
  (void)window;
  st.tau_int = std::max(tau, 0.5);
  st.std_error = std::sqrt(2.0 * st.tau_int * var / double(n));

  // Binning table: naive stderr at doubling bin sizes.
  std::vector<double> series = xs;
  while (series.size() >= 8) {
    double m = 0.0;
    for (double x : series) m += x;
    m /= double(series.size());
    double v = 0.0;
    for (double x : series) v += (x - m) * (x - m);
    v /= double(series.size() - 1);
    st.binning.push_back(std::sqrt(v / double(series.size())));
    std::vector<double> next(series.size() / 2);
    for (size_t i = 0; i < next.size(); ++i)
      next[i] = 0.5 * (series[2 * i] + series[2 * i + 1]);
    series.swap(next);
  }
  return st;
}

namespace {

// Regularized upper incomplete gamma Q(s, x) via series / continued fraction.
double gamma_q(double s, double x) {
  if (x < 0.0 || s <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) {
    // P(s,x) series
    double sum = 1.0 / s, term = sum, a = s;
    for (int i = 0; i < 500; ++i) {
      a += 1.0;
      term *= x / a;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
    }
    double p = sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    return 1.0 - p;
  }
  // Q(s,x) continued fraction (Lentz)
  double tiny = 1e-300;
  double b = x + 1.0 - s, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -double(i) * (double(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

}  // namespace

double chi_square_tail(double x, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi_square_tail: dof must be positive");
  return gamma_q(0.5 * dof, 0.5 * x);
}

double chi_square_test(const std::vector<int64_t>& observed,
                       const std::vector<double>& expected_probs,
                       double min_expected) {
  if (observed.size() != expected_probs.size())
    throw std::invalid_argument("chi_square_test: size mismatch");
  int64_t total = 0;
  for (int64_t o : observed) total += o;
  if (total == 0) throw std::invalid_argument("chi_square_test: no observations");

  // Pool small-expectation bins.
  std::vector<double> exp_pooled;
  std::vector<double> obs_pooled;
  double eacc = 0.0, oacc = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    eacc += expected_probs[i] * double(total);
    oacc += double(observed[i]);
    if (eacc >= min_expected) {
      exp_pooled.push_back(eacc);
      obs_pooled.push_back(oacc);
      eacc = oacc = 0.0;
    }
  }
  if (eacc > 0.0 || oacc > 0.0) {
    if (!exp_pooled.empty()) {
      exp_pooled.back() += eacc;
      obs_pooled.back() += oacc;
    } else {
      exp_pooled.push_back(eacc);
      obs_pooled.push_back(oacc);
    }
  }
  if (exp_pooled.size() < 2) return 1.0;
  double chi2 = 0.0;
  for (size_t i = 0; i < exp_pooled.size(); ++i) {
    double d = obs_pooled[i] - exp_pooled[i];
    chi2 += d * d / exp_pooled[i];
  }
  return chi_square_tail(chi2, int(exp_pooled.size()) - 1);
}

double total_variation(const std::vector<int64_t>& observed,
                       const std::vector<double>& expected_probs) {
  if (observed.size() != expected_probs.size())
    throw std::invalid_argument("total_variation: size mismatch");
  int64_t total = 0;
  for (int64_t o : observed) total += o;
  double tv = 0.0;
  for (size_t i = 0; i < observed.size(); ++i)
    tv += std::fabs(double(observed[i]) / double(total) - expected_probs[i]);
  return 0.5 * tv;
}

}  // namespace maglim
