#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "maglim/lattice.hpp"
#include "maglim/sampler.hpp"
#include "maglim/stats.hpp"

namespace maglim {

// Fixed multi-scale family of test functions: 3 bump profiles x 4 dyadic
// scales x 4 translations = 48 functions, supported in a square of the given
// physical side centered at the origin. Scale k occupies dyadic boxes of side
// support_side / 2^k.
class TestFamily {
 public:
  explicit TestFamily(double support_side);

  int size() const { return 48; }
  int scale_of(int j) const { return j / 12 + 1; }  // 1..4
  double support_side() const { return side_; }

  // f_j evaluated at the region's sites, with the family centered at the
  // region's physical center. Throws if the support exceeds the region.
  std::vector<double> sample(const LatticeRegion& region, int j) const;

 private:
  double side_;
};

// All 48 pairings <Phi^a, f_j> of one spin snapshot.
std::vector<double> pairing_vector(const SpinConfig& spin, const LatticeRegion& region,
                                   double a, const TestFamily& family);

// Energy distance between two samples of pairing vectors, per dyadic scale
// block (12 components each), combined as sum_k 2^{-k} * min(d_k, 1).
struct DistanceReport {
  std::vector<double> per_scale;      // energy distance per scale block
  std::vector<double> per_scale_err;  // spread over sample quarters
  double total = 0.0;                 // dyadically weighted, capped per block
  double total_err = 0.0;
};
DistanceReport pairing_energy_distance(const std::vector<std::vector<double>>& xs,
                                       const std::vector<std::vector<double>>& ys,
                                       const TestFamily& family);

// Distance in law between the field on a small box and on a larger box, both
// paired against test functions supported in the small box.
DistanceReport nested_field_distance(double h, double a, int l_small_sites,
                                     int l_big_sites, const TestFamily& family,
                                     const ChainSpec& spec, int n_chains);

struct AnnulusMatchReport {
  Estimate circuit;  // open circuit present
  Estimate ghost;    // circuit cluster ghost-connected
  Estimate joint;
};

// Frequencies of the annulus matching clauses over FK snapshots on a box with
// Plus boundary conditions.
AnnulusMatchReport annulus_matching_probability(double h, double a, int box_sites,
                                                int outer_sites, int inner_sites,
                                                const ChainSpec& spec, int n_chains);

struct AnnulusRecord {
  int index = 0;
  bool circuit = false;  // shared open circuit in both configurations
  bool matched = false;  // shared circuit present (AND-configuration winding)
  bool ghost = false;    // circuit ghost-connected in the box configuration
};

struct CouplingTrace {
  std::vector<AnnulusRecord> records;  // ordered outermost-in
  int success_annulus = -1;            // -1 on failure
  bool success() const { return success_annulus >= 0; }
  // Interior pairing vectors of box and proxy-plane copy, filled on success.
  std::vector<double> interior_box;
  std::vector<double> interior_plane;
  int64_t ordering_violations = 0;  // edges where plane-open but box-closed
};

struct GrandCouplingResult {
  std::vector<CouplingTrace> traces;
  int n_annuli = 0;
  double failure_rate() const;
  int64_t total_ordering_violations() const;
};

// Shared-tape Swendsen-Wang pair: box of side l2 and proxy plane of side
// 4*l2, both Plus bc, updated in lock-step from one random tape addressed by
// absolute plane coordinates. Ratio-4 annuli between l1 and l2 are swept
// outermost-in; success at the first annulus whose AND-configuration carries
// a winding circuit that is ghost-connected in the box configuration, after
// which the interior is copied so both fields agree inside.
GrandCouplingResult grand_coupling_run(double h, double a, int l1_sites, int l2_sites,
                                       int n_runs, const ChainSpec& spec);

// CSV rows "run,annulus,circuit,matched,ghost,success".
void write_coupling_traces(std::ostream& os, const GrandCouplingResult& result);

struct RnReweightReport {
  double max_abs_diff = 0.0;
  int n_states = 0;
  bool pass(double tol = 1e-12) const { return max_abs_diff <= tol; }
};

// Exact check that the h-field spin-sum law equals the h=0 law reweighted by
// e^{h m} / E[e^{h m}], on an enumerable region.
RnReweightReport rn_reweight_check(double h, const LatticeRegion& region,
                                   BoundaryCondition bc);

}  // namespace maglim
