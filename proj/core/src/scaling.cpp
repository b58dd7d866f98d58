#include "maglim/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "maglim/rng.hpp"

namespace maglim {

PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::vector<double>& y_errs) {
  if (xs.size() != ys.size() || xs.size() != y_errs.size())
    throw std::invalid_argument("fit_power_law: size mismatch");
  if (xs.size() < 2) throw std::invalid_argument("fit_power_law: need >= 2 points");

  // Straight-line WLS in (log x, log y); weight = 1/sigma_log^2.
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  std::vector<double> lx(xs.size()), ly(xs.size()), lw(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0.0 || ys[i] <= 0.0)
      throw std::invalid_argument("fit_power_law: values must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
    double sigma = y_errs[i] > 0.0 ? y_errs[i] / ys[i] : 1e-12;
    lw[i] = 1.0 / (sigma * sigma);
    sw += lw[i];
    swx += lw[i] * lx[i];
    swy += lw[i] * ly[i];
    swxx += lw[i] * lx[i] * lx[i];
    swxy += lw[i] * lx[i] * ly[i];
  }
  double det = sw * swxx - swx * swx;
  if (det <= 0.0) throw std::runtime_error("fit_power_law: degenerate design");
  PowerLawFit fit;
  fit.exponent = (sw * swxy - swx * swy) / det;
  fit.log_prefactor = (swxx * swy - swx * swxy) / det;
  fit.exponent_err = std::sqrt(sw / det);
  fit.log_prefactor_err = std::sqrt(swxx / det);
  for (size_t i = 0; i < xs.size(); ++i) {
    double r = ly[i] - (fit.log_prefactor + fit.exponent * lx[i]);
    fit.chi2 += lw[i] * r * r;
  }
  fit.dof = int(xs.size()) - 2;
  // Scale-factor prescription: when the scatter exceeds the stated errors the
  // misfit is systematic, and the parameter errors inherit it.
  if (fit.dof > 0 && fit.chi2 > fit.dof) {
    double s = std::sqrt(fit.chi2 / fit.dof);
    fit.exponent_err *= s;
    fit.log_prefactor_err *= s;
  }
  return fit;
}

LegendrePair legendre_transfer(double alpha, double b) {
  if (alpha <= 1.0 || b <= 0.0)
    throw std::invalid_argument("legendre_transfer: need alpha > 1, b > 0");
  LegendrePair out;
  out.alpha_prime = alpha / (alpha - 1.0);
  out.c = (1.0 - 1.0 / alpha) * std::pow(alpha * b, -1.0 / (alpha - 1.0));
  return out;
}

double legendre_sup(double x, double alpha, double b, double t_max) {
  if (alpha <= 1.0 || b <= 0.0 || x < 0.0)
    throw std::invalid_argument("legendre_sup domain");
  // phi(t) = x t - b t^alpha is concave on t > 0; golden-section search.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  auto phi = [&](double t) { return x * t - b * std::pow(t, alpha); };
  // bracket the maximum: double until phi starts decreasing
  double hi = 1.0;
  while (hi < t_max && phi(2.0 * hi) >= phi(hi)) hi *= 2.0;
  hi = std::min(2.0 * hi, t_max);
  double lo = 0.0;
  double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
  double f1 = phi(c1), f2 = phi(c2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + gr * (hi - lo);
      f2 = phi(c2);
    } else {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - gr * (hi - lo);
      f1 = phi(c1);
    }
    if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
  }
  return std::max(phi(0.5 * (lo + hi)), 0.0);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    // advance past ties in both samples before comparing the empirical cdfs
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

double ks_permutation_pvalue(const std::vector<double>& a, const std::vector<double>& b,
                             int n_perm, uint64_t seed) {
  double d0 = ks_statistic(a, b);
  std::vector<double> pool;
  pool.reserve(a.size() + b.size());
  pool.insert(pool.end(), a.begin(), a.end());
  pool.insert(pool.end(), b.begin(), b.end());
  CounterRng rng = CounterRng::stream(seed, 0);
  int hits = 0;
  std::vector<double> pa(a.size()), pb(b.size());
  for (int p = 0; p < n_perm; ++p) {
    // Fisher-Yates
    for (size_t k = pool.size() - 1; k > 0; --k) {
      size_t r = rng.below(k + 1);
      std::swap(pool[k], pool[r]);
    }
    std::copy(pool.begin(), pool.begin() + a.size(), pa.begin());
    std::copy(pool.begin() + a.size(), pool.end(), pb.begin());
    if (ks_statistic(pa, pb) >= d0) ++hits;
  }
  // add-one smoothing so the p-value is never exactly 0
  return double(hits + 1) / double(n_perm + 1);
}

TailFitResult fit_log_tail(const std::vector<double>& samples, int n_thresholds,
                           double lo_quantile, double hi_quantile) {
  if (samples.size() < 100) throw std::invalid_argument("fit_log_tail: too few samples");
  if (n_thresholds < 3) throw std::invalid_argument("fit_log_tail: need >= 3 thresholds");
  std::vector<double> xs = samples;
  std::sort(xs.begin(), xs.end());
  double lo = xs[size_t(lo_quantile * (xs.size() - 1))];
  double hi = xs[size_t(hi_quantile * (xs.size() - 1))];
  if (lo <= 0.0 || hi <= lo)
    throw std::invalid_argument("fit_log_tail: threshold range not positive");

  TailFitResult out;
  std::vector<double> errs;
  for (int k = 0; k < n_thresholds; ++k) {
    double x = lo * std::pow(hi / lo, double(k) / (n_thresholds - 1));
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    int64_t exceed = int64_t(xs.end() - it);
    if (exceed < 10) break;  // tail too thin for a stable count
    double p = double(exceed) / double(xs.size());
    out.thresholds.push_back(x);
    out.neg_log_tail.push_back(-std::log(p));
    // delta method: sigma(-log p) = sigma(p)/p with binomial sigma(p)
    errs.push_back(std::sqrt((1.0 - p) / (p * double(xs.size()))));
  }
  if (out.thresholds.size() < 3)
    throw std::runtime_error("fit_log_tail: not enough usable thresholds");
  out.fit = fit_power_law(out.thresholds, out.neg_log_tail, errs);
  return out;
}

std::vector<double> sample_stretched_tail(double c, double alpha_prime, int64_t n,
                                          uint64_t seed) {
  if (c <= 0.0 || alpha_prime <= 0.0)
    throw std::invalid_argument("sample_stretched_tail domain");
  std::vector<double> out(n);
  CounterRng rng = CounterRng::stream(seed, 1);
  for (int64_t i = 0; i < n; ++i) {
    double u = rng.uniform();
    // P(X > x) = exp(-c x^a') => x = (-log u / c)^{1/a'}
    out[i] = std::pow(-std::log1p(-u) / c, 1.0 / alpha_prime);
  }
  return out;
}

DyadicReport dyadic_exponents(const std::vector<double>& ts,
                              const std::vector<double>& values,
                              const std::vector<double>& errors) {
  if (ts.size() != values.size() || ts.size() != errors.size())
    throw std::invalid_argument("dyadic_exponents: size mismatch");
  DyadicReport rep;
  rep.ts = ts;
  rep.values = values;
  rep.errors = errors;
  const double l2 = std::log(2.0);
  for (size_t i = 0; i + 1 < ts.size(); ++i) {
    if (std::fabs(ts[i + 1] / ts[i] - 2.0) > 1e-9)
      throw std::invalid_argument("dyadic_exponents: grid must double");
    if (values[i] <= 0.0 || values[i + 1] <= 0.0) {
      rep.ratios.push_back(std::nan(""));
      rep.ratio_errs.push_back(std::nan(""));
      continue;
    }
    rep.ratios.push_back(std::log(values[i + 1] / values[i]) / l2);
    rep.ratio_errs.push_back(std::sqrt(std::pow(errors[i + 1] / values[i + 1], 2) +
                                       std::pow(errors[i] / values[i], 2)) /
                             l2);
  }
  return rep;
}

}  // namespace maglim
