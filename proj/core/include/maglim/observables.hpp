#pragma once

#include <complex>
#include <vector>

#include "maglim/cluster.hpp"
#include "maglim/lattice.hpp"
#include "maglim/sampler.hpp"
#include "maglim/stats.hpp"

namespace maglim {

// a^{15/8} * sum of spins in the mask.
double block_magnetization(const SpinConfig& spin, const RegionMask& mask, double a);

// a^{15/8} * sum_x sigma_x f(x), f sampled at sites.
double pair_field(const SpinConfig& spin, const std::vector<double>& f, double a);

struct ComplexEstimate {
  std::complex<double> value;
  double re_err = 0.0;
  double im_err = 0.0;
  int64_t n = 0;
};

// Empirical mean of exp(i t m) over magnetization samples.
ComplexEstimate charfn_naive(const std::vector<double>& mag_samples, double t);

// One snapshot's term of the FK cosine-product estimator:
// exp(i t A_pinned) * prod over free clusters of cos(t A_i), where pinned
// clusters contribute their area with the pinned sign.
std::complex<double> charfn_fk_term(const ClusterDecomposition& decomp,
                                    BoundaryCondition bc, double t);

ComplexEstimate complex_mean(const std::vector<std::complex<double>>& terms);

// Gauss-Legendre nodes/weights on [0, 1].
std::vector<std::pair<double, double>> gauss_legendre_unit(int n);

// How chains are scheduled for a measured observable.
struct SamplingPlan {
  Algorithm algorithm = Algorithm::SwendsenWang;
  int64_t n_equil = 200;
  int64_t n_meas = 1000;
  int64_t thin = 1;
  int n_chains = 4;
  uint64_t seed = 1;
};

// Per-chain series combined into one estimate: inverse-variance-free simple
// average of chain means; error from per-chain autocorrelation-corrected
// standard errors.
Estimate combine_chain_series(const std::vector<std::vector<double>>& chains);

// Mean block magnetization under the given parameters (parallel chains).
Estimate measure_mean_magnetization(const LatticeRegion& region, BoundaryCondition bc,
                                    const ModelParams& params, const RegionMask& mask,
                                    const SamplingPlan& plan);

struct TiSpec {
  SamplingPlan plan;
  int nodes = 16;  // Gauss-Legendre nodes per t-interval
};

// log E[e^{t m}] by thermodynamic integration of the measured near-critical
// mean magnetization over the renormalized field s in [0, t].
Estimate log_mgf_ti(double t, BoundaryCondition bc, const LatticeRegion& region,
                    double a, const TiSpec& spec);

struct FreeEnergyCurve {
  BoundaryCondition bc = BoundaryCondition::Free;
  double side = 0.0;  // physical side L
  std::vector<double> ts;
  std::vector<double> values;  // f_L(t)
  std::vector<double> errors;
  std::vector<double> nodes_used;  // integration s-grid
};

// f_L(t) = L^{-2} log E[e^{t m_L}] on the t-grid, by cumulative
// interval-by-interval thermodynamic integration.
FreeEnergyCurve free_energy_curve(BoundaryCondition bc, int side_sites, double a,
                                  const std::vector<double>& t_grid,
                                  const TiSpec& spec);

enum class CrossingKind { AnnulusCircuit, LeftRight };

struct CrossingSpec {
  CrossingKind kind = CrossingKind::AnnulusCircuit;
  AnnulusSpec annulus;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // rectangle for LeftRight
};

// Frequency of the crossing event over FK snapshots.
Estimate crossing_probability(BoundaryCondition bc, const LatticeRegion& region,
                              const ModelParams& params, const CrossingSpec& what,
                              const SamplingPlan& plan);

struct GhsReport {
  std::vector<double> h_grid;
  std::vector<Estimate> means;         // E_h[m]
  std::vector<double> second_diffs;    // interior second differences
  std::vector<double> second_diff_errs;
  bool concave_within(double n_sigma) const;
};

// Measured E_h[m] on an increasing h-grid with second-difference report
// (GHS: concavity of the magnetization in h >= 0).
GhsReport ghs_concavity_check(BoundaryCondition bc, const LatticeRegion& region,
                              double a, const std::vector<double>& h_grid,
                              const SamplingPlan& plan);

}  // namespace maglim
