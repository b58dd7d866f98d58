#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "maglim/stats.hpp"

namespace maglim {

// Weighted least-squares power-law fit y = C x^alpha on log-log axes.
// Parameter errors are inflated by sqrt(chi2/dof) when chi2/dof > 1, so
// systematic misfit is reflected in the quoted uncertainties.
struct PowerLawFit {
  double exponent = 0.0;
  double exponent_err = 0.0;
  double log_prefactor = 0.0;
  double log_prefactor_err = 0.0;
  double chi2 = 0.0;
  int dof = 0;
};

// ys must be positive; y_errs are absolute errors, propagated to log space.
PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::vector<double>& y_errs);

// Legendre / tail-transfer pair: if f(t) ~ b t^alpha (alpha > 1), the
// conjugate rate is g(x) ~ c x^{alpha'} with alpha' = alpha/(alpha-1) and
// c = (1 - 1/alpha) (alpha b)^{-1/(alpha-1)}.
struct LegendrePair {
  double alpha_prime = 0.0;
  double c = 0.0;
};
LegendrePair legendre_transfer(double alpha, double b);

// sup_{t>0} (x t - b t^alpha) computed numerically, for cross-checking the
// closed form above.
double legendre_sup(double x, double alpha, double b, double t_max = 1e300);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Permutation p-value of the KS statistic under exchangeability.
double ks_permutation_pvalue(const std::vector<double>& a, const std::vector<double>& b,
                             int n_perm, uint64_t seed);

// Recovering the conjugate exponent from samples of a synthetic distribution
// with log-tail ~ -c x^{alpha'}: fit -log P(X > x) against x on the largest
// usable decade of thresholds.
struct TailFitResult {
  PowerLawFit fit;          // of -log tail vs threshold
  std::vector<double> thresholds;
  std::vector<double> neg_log_tail;
};
TailFitResult fit_log_tail(const std::vector<double>& samples, int n_thresholds,
                           double lo_quantile = 0.5, double hi_quantile = 0.999);

// Draws n samples with tail P(X > x) = exp(-c x^{alpha'}) for x >= 0
// (Weibull) by inverse transform.
std::vector<double> sample_stretched_tail(double c, double alpha_prime, int64_t n,
                                          uint64_t seed);

// Dyadic free-energy consistency data: values of f at a geometric t-grid and
// ratios log(f(2t)/f(t))/log 2, which converge to the growth exponent.
struct DyadicReport {
  std::vector<double> ts;       // t, 2t, 4t, ...
  std::vector<double> values;   // f(t) per entry
  std::vector<double> errors;
  std::vector<double> ratios;   // log2 f(2t)/f(t)
  std::vector<double> ratio_errs;
};
DyadicReport dyadic_exponents(const std::vector<double>& ts,
                              const std::vector<double>& values,
                              const std::vector<double>& errors);

}  // namespace maglim
