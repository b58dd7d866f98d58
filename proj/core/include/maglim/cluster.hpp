#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "maglim/lattice.hpp"
#include "maglim/sampler.hpp"

namespace maglim {

struct ClusterInfo {
  int label = -1;  // canonical: smallest member site index
  int size = 0;
  double area = 0.0;  // a^{15/8} * size
  bool touches_boundary = false;
  bool ghost = false;
  // site-coordinate bounding box
  int min_i = 0, max_i = 0, min_j = 0, max_j = 0;
};

struct ClusterDecomposition {
  std::vector<int> label;  // per site, canonical
  std::vector<ClusterInfo> clusters;
  double a = 1.0;

  const ClusterInfo& cluster_of(int site) const;
};

// Union-find over open lattice edges, boundary wiring and ghost edges. Ghost
// connectivity is tracked as a flag so areas count lattice sites only.
ClusterDecomposition decompose(const FkConfig& fk, const LatticeRegion& region,
                               double a);

// Total renormalized area of ghost-connected clusters.
double ghost_connected_mass(const ClusterDecomposition& decomp);

// Annulus in site coordinates: half-open rectangles [x0,x1) x [y0,y1).
struct AnnulusSpec {
  int ox0 = 0, oy0 = 0, ox1 = 0, oy1 = 0;  // outer
  int ix0 = 0, iy0 = 0, ix1 = 0, iy1 = 0;  // inner (hole)

  bool degenerate() const {
    return ix0 <= ox0 || iy0 <= oy0 || ix1 >= ox1 || iy1 >= oy1 ||
           ix0 >= ix1 || iy0 >= iy1;
  }
  static AnnulusSpec from_phys(const LatticeRegion& region, const PhysRect& outer,
                               const PhysRect& inner);
  // Centered square annulus: outer side `outer_sites`, inner side
  // `inner_sites`, both centered in the region.
  static AnnulusSpec centered(const LatticeRegion& region, int outer_sites,
                              int inner_sites);
};

// True iff an open cluster inside the annulus winds around the hole.
// Detection: weighted union-find with a winding offset across a radial slit;
// closing a cycle with nonzero net offset is exactly a circuit.
bool open_circuit(const FkConfig& fk, const LatticeRegion& region,
                  const AnnulusSpec& annulus);

// All annulus sites belonging to winding (circuit-carrying) clusters; empty
// when no circuit is present.
std::vector<int> open_circuit_sites(const FkConfig& fk, const LatticeRegion& region,
                                    const AnnulusSpec& annulus);

// Same event on the dual lattice (dual edge open iff primal edge closed).
bool dual_circuit(const FkConfig& fk, const LatticeRegion& region,
                  const AnnulusSpec& annulus);

// Dual path from the hole to the outside of the annulus; mutually exclusive
// with open_circuit on the same annulus (used as a cross-check).
bool dual_radial_crossing(const FkConfig& fk, const LatticeRegion& region,
                          const AnnulusSpec& annulus);

// Left-right open crossing of the rectangle [x0,x1) x [y0,y1).
bool rect_crossing(const FkConfig& fk, const LatticeRegion& region, int x0, int y0,
                   int x1, int y1);

struct AnnulusEventReport {
  AnnulusSpec annulus;
  bool open_circuit_present = false;
  bool dual_circuit_present = false;
  bool circuit_ghost_connected = false;
};

AnnulusEventReport annulus_events(const FkConfig& fk, const LatticeRegion& region,
                                  const AnnulusSpec& annulus);

// Tile the region into eps-squares and count squares containing a cluster
// that avoids the square's outermost site layer and has renormalized area in
// [eps^{15/8}/M, M eps^{15/8}]. eps must divide the region side.
int mesoscopic_scan(const FkConfig& fk, const LatticeRegion& region, double a,
                    double eps, double mass_window);
int mesoscopic_scan(const ClusterDecomposition& decomp, const LatticeRegion& region,
                    double eps, double mass_window);

// Per-snapshot cluster summary rows: "snapshot,cluster_id,size,area,boundary,ghost".
void write_cluster_summary(std::ostream& os, int snapshot,
                           const ClusterDecomposition& decomp);

}  // namespace maglim
