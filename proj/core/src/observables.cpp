#include "maglim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "maglim/util.hpp"

namespace maglim {

namespace {
std::atomic<int> g_threads{0};
}

void set_num_threads(int n) { g_threads.store(n); }
int num_threads() {
  int n = g_threads.load();
  if (n > 0) return n;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

double block_magnetization(const SpinConfig& spin, const RegionMask& mask, double a) {
  long sum = 0;
  for (int s = 0; s < mask.size(); ++s)
    if (mask.test(s)) sum += spin.spins[s];
  return renormalization_factor(a) * double(sum);
}

double pair_field(const SpinConfig& spin, const std::vector<double>& f, double a) {
  if (f.size() != spin.spins.size())
    throw std::invalid_argument("pair_field: test function size mismatch");
  double sum = 0.0;
  for (size_t s = 0; s < f.size(); ++s) sum += spin.spins[s] * f[s];
  return renormalization_factor(a) * sum;
}

ComplexEstimate charfn_naive(const std::vector<double>& mag_samples, double t) {
  std::vector<std::complex<double>> terms;
  terms.reserve(mag_samples.size());
  for (double m : mag_samples)
    terms.emplace_back(std::cos(t * m), std::sin(t * m));
  return complex_mean(terms);
}

std::complex<double> charfn_fk_term(const ClusterDecomposition& decomp,
                                    BoundaryCondition bc, double t) {
  double pinned_area = 0.0;
  double log_abs = 0.0;
  int neg = 0;
  bool zero = false;
  for (const auto& c : decomp.clusters) {
    if (c.ghost) {
      pinned_area += c.area;  // ghost clusters are pinned to +1
    } else if (c.touches_boundary) {
      pinned_area += bc_sign(bc) * c.area;
    } else {
      double f = std::cos(t * c.area);
      if (f == 0.0) { zero = true; break; }
      if (f < 0.0) ++neg;
      log_abs += std::log(std::fabs(f));
    }
  }
  if (zero) return 0.0;
  double mag = std::exp(log_abs) * (neg % 2 ? -1.0 : 1.0);
  return mag * std::complex<double>(std::cos(t * pinned_area), std::sin(t * pinned_area));
}

ComplexEstimate complex_mean(const std::vector<std::complex<double>>& terms) {
  std::vector<double> re(terms.size()), im(terms.size());
  for (size_t i = 0; i < terms.size(); ++i) {
    re[i] = terms[i].real();
    im[i] = terms[i].imag();
  }
  auto sr = SeriesStats::from_series(re);
  auto si = SeriesStats::from_series(im);
  ComplexEstimate est;
  est.value = {sr.mean, si.mean};
  est.re_err = sr.std_error;
  est.im_err = si.std_error;
  est.n = int64_t(terms.size());
  return est;
}

std::vector<std::pair<double, double>> gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be >= 1");
  // Newton iteration on Legendre roots over [-1, 1], then map to [0, 1].
  std::vector<std::pair<double, double>> out(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    out[i] = {0.5 * (x + 1.0), 0.5 * w};
  }
  std::sort(out.begin(), out.end());
  return out;
}

Estimate combine_chain_series(const std::vector<std::vector<double>>& chains) {
  Estimate est;
  double vsum = 0.0;
  int k = 0;
  for (const auto& xs : chains) {
    if (xs.empty()) continue;
    auto st = SeriesStats::from_series(xs);
    est.value += st.mean;
    vsum += st.std_error * st.std_error;
    est.n += st.count;
    // Unstable autocorrelation estimate: window swallowed a large part of the
    // series, the error bar is not trustworthy.
    if (st.tau_int > double(st.count) / 20.0) est.flagged = true;
    ++k;
  }
  if (k == 0) return est;
  est.value /= double(k);
  est.error = std::sqrt(vsum) / double(k);
  return est;
}

Estimate measure_mean_magnetization(const LatticeRegion& region, BoundaryCondition bc,
                                    const ModelParams& params, const RegionMask& mask,
                                    const SamplingPlan& plan) {
  std::vector<std::vector<double>> series(plan.n_chains);
  parallel_for(plan.n_chains, [&](int64_t c) {
    ChainSpec spec{plan.algorithm, plan.n_equil, plan.n_meas, plan.thin, plan.seed};
    series[c].reserve(plan.n_meas);
    run_chain(region, bc, params, spec, uint64_t(c),
              [&](const SpinConfig& spin, const FkConfig*) {
                series[c].push_back(block_magnetization(spin, mask, params.a));
              });
  });
  return combine_chain_series(series);
}

namespace {

// Integrate measured node values with a different rule (piecewise-linear
// through the nodes) to estimate quadrature sensitivity.
double trapezoid_through_nodes(const std::vector<double>& s,
                               const std::vector<double>& v, double t0, double t1) {
  // Endpoints by constant extension of the nearest node.
  double acc = 0.0;
  double prev_s = t0, prev_v = v.front();
  for (size_t i = 0; i < s.size(); ++i) {
    acc += 0.5 * (prev_v + v[i]) * (s[i] - prev_s);
    prev_s = s[i];
    prev_v = v[i];
  }
  acc += prev_v * (t1 - prev_s);
  return acc;
}

}  // namespace

Estimate log_mgf_ti(double t, BoundaryCondition bc, const LatticeRegion& region,
                    double a, const TiSpec& spec) {
  if (t < 0.0) throw std::invalid_argument("log_mgf_ti: t must be >= 0 (use flip symmetry)");
  Estimate est;
  if (t == 0.0) return est;  // exactly 0

  auto gl = gauss_legendre_unit(spec.nodes);
  RegionMask mask = full_mask(region);
  std::vector<double> svals(gl.size()), node_means(gl.size());
  bool flagged = false;
  // One chain task per (node, chain) pair for better load balance.
  const int nc = spec.plan.n_chains;
  std::vector<std::vector<std::vector<double>>> series(gl.size());
  for (auto& v : series) v.resize(nc);
  parallel_for(int64_t(gl.size()) * nc, [&](int64_t task) {
    int node = int(task / nc), c = int(task % nc);
    double s = t * gl[node].first;
    ModelParams p = ModelParams::critical(s, a);
    ChainSpec cs{spec.plan.algorithm, spec.plan.n_equil, spec.plan.n_meas,
                 spec.plan.thin, spec.plan.seed + uint64_t(node) * 1000003ULL};
    series[node][c].reserve(spec.plan.n_meas);
    run_chain(region, bc, p, cs, uint64_t(c),
              [&](const SpinConfig& spin, const FkConfig*) {
                series[node][c].push_back(block_magnetization(spin, mask, a));
              });
  });
  double value = 0.0, var = 0.0;
  for (size_t i = 0; i < gl.size(); ++i) {
    Estimate node_est = combine_chain_series(series[i]);
    svals[i] = t * gl[i].first;
    node_means[i] = node_est.value;
    flagged = flagged || node_est.flagged;
    double w = t * gl[i].second;
    value += w * node_est.value;
    var += (w * node_est.error) * (w * node_est.error);
    est.n += node_est.n;
  }
  double quad_term = std::fabs(trapezoid_through_nodes(svals, node_means, 0.0, t) - value);
  est.value = value;
  est.error = std::sqrt(var + quad_term * quad_term);
  est.flagged = flagged;
  return est;
}

FreeEnergyCurve free_energy_curve(BoundaryCondition bc, int side_sites, double a,
                                  const std::vector<double>& t_grid,
                                  const TiSpec& spec) {
  LatticeRegion region = build_region(side_sites, side_sites, a);
  const double side = side_sites * a;
  FreeEnergyCurve curve;
  curve.bc = bc;
  curve.side = side;
  curve.ts = t_grid;

  RegionMask mask = full_mask(region);
  auto gl = gauss_legendre_unit(spec.nodes);
  const int nc = spec.plan.n_chains;

  // Composite quadrature: per interval [t_{j-1}, t_j] with t_0 = 0; each
  // interval's integral accumulates into the curve.
  struct Node {
    double s, w;
    int interval;
  };
  std::vector<Node> nodes;
  double prev = 0.0;
  for (size_t j = 0; j < t_grid.size(); ++j) {
    double t = t_grid[j];
    if (t < prev) throw std::invalid_argument("free_energy_curve: t-grid must be increasing");
    if (t == prev) continue;
    for (auto [x, w] : gl)
      nodes.push_back({prev + (t - prev) * x, (t - prev) * w, int(j)});
    prev = t;
  }

  std::vector<std::vector<std::vector<double>>> series(nodes.size());
  for (auto& v : series) v.resize(nc);
  parallel_for(int64_t(nodes.size()) * nc, [&](int64_t task) {
    int node = int(task / nc), c = int(task % nc);
    ModelParams p = ModelParams::critical(nodes[node].s, a);
    ChainSpec cs{spec.plan.algorithm, spec.plan.n_equil, spec.plan.n_meas,
                 spec.plan.thin, spec.plan.seed + uint64_t(node) * 1000003ULL};
    series[node][c].reserve(spec.plan.n_meas);
    run_chain(region, bc, p, cs, uint64_t(c),
              [&](const SpinConfig& spin, const FkConfig*) {
                series[node][c].push_back(block_magnetization(spin, mask, a));
              });
  });

  std::vector<double> interval_val(t_grid.size(), 0.0), interval_var(t_grid.size(), 0.0);
  for (size_t i = 0; i < nodes.size(); ++i) {
    Estimate e = combine_chain_series(series[i]);
    interval_val[nodes[i].interval] += nodes[i].w * e.value;
    interval_var[nodes[i].interval] += (nodes[i].w * e.error) * (nodes[i].w * e.error);
    curve.nodes_used.push_back(nodes[i].s);
  }
  const double inv_area = 1.0 / (side * side);
  double acc = 0.0, accvar = 0.0;
  for (size_t j = 0; j < t_grid.size(); ++j) {
    acc += interval_val[j];
    accvar += interval_var[j];
    curve.values.push_back(t_grid[j] == 0.0 ? 0.0 : acc * inv_area);
    curve.errors.push_back(std::sqrt(accvar) * inv_area);
  }
  return curve;
}

Estimate crossing_probability(BoundaryCondition bc, const LatticeRegion& region,
                              const ModelParams& params, const CrossingSpec& what,
                              const SamplingPlan& plan) {
  std::vector<std::vector<double>> series(plan.n_chains);
  parallel_for(plan.n_chains, [&](int64_t c) {
    ChainSpec spec{Algorithm::SwendsenWang, plan.n_equil, plan.n_meas, plan.thin,
                   plan.seed};
    run_chain(region, bc, params, spec, uint64_t(c),
              [&](const SpinConfig&, const FkConfig* fk) {
                bool hit = false;
                if (what.kind == CrossingKind::AnnulusCircuit)
                  hit = open_circuit(*fk, region, what.annulus);
                else
                  hit = rect_crossing(*fk, region, what.x0, what.y0, what.x1, what.y1);
                series[c].push_back(hit ? 1.0 : 0.0);
              });
  });
  return combine_chain_series(series);
}

bool GhsReport::concave_within(double n_sigma) const {
  for (size_t i = 0; i < second_diffs.size(); ++i)
    if (second_diffs[i] > n_sigma * second_diff_errs[i]) return false;
  return true;
}

GhsReport ghs_concavity_check(BoundaryCondition bc, const LatticeRegion& region,
                              double a, const std::vector<double>& h_grid,
                              const SamplingPlan& plan) {
  for (size_t i = 0; i + 1 < h_grid.size(); ++i)
    if (h_grid[i + 1] <= h_grid[i] || h_grid[i] < 0.0)
      throw std::invalid_argument("ghs_concavity_check: h-grid must be increasing, h >= 0");
  GhsReport rep;
  rep.h_grid = h_grid;
  rep.means.resize(h_grid.size());
  RegionMask mask = full_mask(region);
  parallel_for(int64_t(h_grid.size()), [&](int64_t i) {
    SamplingPlan p = plan;
    p.seed = plan.seed + uint64_t(i) * 7919ULL;
    rep.means[i] =
        measure_mean_magnetization(region, bc, ModelParams::critical(h_grid[i], a), mask, p);
  });
  // Divided second differences on the (possibly non-uniform) grid.
  for (size_t i = 1; i + 1 < h_grid.size(); ++i) {
    double h0 = h_grid[i - 1], h1 = h_grid[i], h2 = h_grid[i + 1];
    double m0 = rep.means[i - 1].value, m1 = rep.means[i].value, m2 = rep.means[i + 1].value;
    double d = (m2 - m1) / (h2 - h1) - (m1 - m0) / (h1 - h0);
    double e = std::sqrt(std::pow(rep.means[i + 1].error / (h2 - h1), 2) +
                         std::pow(rep.means[i].error / (h2 - h1), 2) +
                         std::pow(rep.means[i].error / (h1 - h0), 2) +
                         std::pow(rep.means[i - 1].error / (h1 - h0), 2));
    rep.second_diffs.push_back(d);
    rep.second_diff_errs.push_back(e);
  }
  return rep;
}

}  // namespace maglim
