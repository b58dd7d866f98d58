#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "maglim/lattice.hpp"

namespace maglim {

// Exact law of the total spin sum S on a small region, from exhaustive
// enumeration. Support is a subset of {-N, -N+2, ..., N}.
struct ExactDistribution {
  std::vector<int> spin_sums;       // sorted ascending
  std::vector<double> probs;        // same length, sums to 1
  double log_partition = 0.0;
  double a = 1.0;
  BoundaryCondition bc = BoundaryCondition::Free;

  double prob_of(int spin_sum) const;
  double mean() const;      // E[S]
  double variance() const;  // Var(S)
  // E[m^a] and Var(m^a) with m^a = a^{15/8} S.
  double mean_mag() const { return renormalization_factor(a) * mean(); }
  double var_mag() const {
    double r = renormalization_factor(a);
    return r * r * variance();
  }
};

inline constexpr int kMaxEnumSites = 24;
inline constexpr int kMaxEnumEdges = 12;

// Exact Boltzmann law with weight exp(beta * sum_<xy> s_x s_y + h_site * sum_x s_x),
// boundary bonds to the frozen +/- ghost layer included per bc.
ExactDistribution enumerate_ising(const LatticeRegion& region, BoundaryCondition bc,
                                  const ModelParams& params);

// E[exp(t * a^{15/8} S)], computed in the log domain.
double exact_log_mgf(const ExactDistribution& dist, double t);
double exact_mgf(const ExactDistribution& dist, double t);

// E[exp(i t a^{15/8} S)].
std::complex<double> exact_charfn(const ExactDistribution& dist, double t);

// Fixture I/O: header lines starting with '#', then tab-separated "S\tprob".
void write_distribution(std::ostream& os, const ExactDistribution& dist,
                        const LatticeRegion& region, const ModelParams& params);
ExactDistribution read_distribution(std::istream& is);

// --- Exact q = 2 random-cluster measure with ghost vertex -------------------

// Edge kinds in the augmented graph: lattice edges, boundary-wiring edges
// (one per missing neighbor of a boundary site, +/- bc only), and ghost
// edges (one per site, present when h > 0).
struct FkEdge {
  enum Kind : uint8_t { Lattice, Boundary, Ghost } kind;
  int a = -1;  // site
  int b = -1;  // second site for Lattice edges, else -1
  double p = 0.0;
};

struct FkExactMeasure {
  std::vector<FkEdge> edges;
  std::vector<double> config_probs;  // one per edge subset, indexed by bitmask
  LatticeRegion region;
  BoundaryCondition bc = BoundaryCondition::Free;
  ModelParams params;

  int num_edges() const { return int(edges.size()); }
  // Marginal probability that edge e is open.
  double edge_marginal(int e) const;
  // Joint distribution over the lattice-edge bond pattern only
  // (boundary and ghost edges traced out). Indexed by lattice-edge bitmask.
  std::vector<double> lattice_bond_distribution() const;
  // E[a^{15/8} * (#sites connected to the ghost)].
  double mean_ghost_mass() const;
  // Spin marginal via Edwards-Sokal coloring of the clusters.
  ExactDistribution spin_marginal() const;
};

// Exact FK measure: per-edge weight p = 1 - exp(-2 beta) on lattice and
// boundary edges, p_g = 1 - exp(-2 h_site) on ghost edges, cluster weight
// 2^{#free clusters}; configurations wiring the boundary vertex to the ghost
// vertex have weight 0 under Minus bc. Refuses graphs above kMaxEnumEdges.
FkExactMeasure enumerate_fk(const LatticeRegion& region, BoundaryCondition bc,
                            const ModelParams& params);

}  // namespace maglim
