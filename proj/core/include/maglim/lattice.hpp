#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace maglim {

// Square-lattice critical point, exp(-2*beta_c) = sqrt(2) - 1.
inline double beta_c() { return 0.5 * std::log(1.0 + std::sqrt(2.0)); }

// a^{15/8}, the per-spin renormalization of the magnetization field.
double renormalization_factor(double a);

enum class BoundaryCondition : uint8_t { Plus, Minus, Free };

const char* bc_name(BoundaryCondition bc);
BoundaryCondition bc_from_name(const std::string& name);
inline int bc_sign(BoundaryCondition bc) {
  return bc == BoundaryCondition::Plus ? +1 : (bc == BoundaryCondition::Minus ? -1 : 0);
}

struct PhysRect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0,x1) x [y0,y1)
};

// Finite rectangle of sites at physical positions origin + a*(i, j).
class LatticeRegion {
 public:
  LatticeRegion() = default;
  LatticeRegion(int width, int height, double a, double origin_x = 0.0,
                double origin_y = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int num_sites() const { return width_ * height_; }
  double spacing() const { return a_; }
  double origin_x() const { return ox_; }
  double origin_y() const { return oy_; }
  double extent_x() const { return width_ * a_; }
  double extent_y() const { return height_ * a_; }

  int index(int i, int j) const { return j * width_ + i; }
  int col(int site) const { return site % width_; }
  int row(int site) const { return site / width_; }
  double pos_x(int site) const { return ox_ + a_ * col(site); }
  double pos_y(int site) const { return oy_ + a_ * row(site); }

  bool on_boundary(int site) const {
    int i = col(site), j = row(site);
    return i == 0 || j == 0 || i == width_ - 1 || j == height_ - 1;
  }
  // Number of missing lattice neighbors, i.e. bonds into the frozen
  // ghost layer under +/- boundary conditions.
  int boundary_bonds(int site) const {
    int i = col(site), j = row(site);
    return (i == 0) + (i == width_ - 1) + (j == 0) + (j == height_ - 1);
  }

  // Edge indexing: horizontal edges (i,j)-(i+1,j) first, then vertical.
  int num_hedges() const { return (width_ - 1) * height_; }
  int num_vedges() const { return width_ * (height_ - 1); }
  int num_edges() const { return num_hedges() + num_vedges(); }
  int hedge(int i, int j) const { return j * (width_ - 1) + i; }
  int vedge(int i, int j) const { return num_hedges() + j * width_ + i; }
  bool is_hedge(int e) const { return e < num_hedges(); }
  // Endpoint sites of an edge.
  std::pair<int, int> edge_sites(int e) const;

 private:
  int width_ = 1, height_ = 1;
  double a_ = 1.0, ox_ = 0.0, oy_ = 0.0;
};

LatticeRegion build_region(int width, int height, double a, double origin_x = 0.0,
                           double origin_y = 0.0);

// Unit square [0,1)^2 discretized with n sites per side at mesh 1/n.
inline LatticeRegion unit_square_region(int n) {
  return build_region(n, n, 1.0 / n);
}

struct ModelParams {
  double beta = 0.0;  // inverse temperature
  double h = 0.0;     // renormalized field strength
  double a = 1.0;     // mesh

  // Per-site field h * a^{15/8}; always derived, never stored.
  double h_site() const { return h * renormalization_factor(a); }

  static ModelParams critical(double h = 0.0, double a = 1.0) {
    return ModelParams{beta_c(), h, a};
  }
};

class RegionMask {
 public:
  RegionMask() = default;
  explicit RegionMask(int num_sites) : bits_(num_sites, 0) {}

  int size() const { return int(bits_.size()); }
  bool test(int site) const { return bits_[site] != 0; }
  void set(int site, bool v = true) {
    count_ += int(v) - int(bits_[site]);
    bits_[site] = v ? 1 : 0;
  }
  int count() const { return count_; }
  const PhysRect& rect() const { return rect_; }
  void set_rect(const PhysRect& r) { rect_ = r; }

  bool operator==(const RegionMask& o) const { return bits_ == o.bits_; }

 private:
  std::vector<uint8_t> bits_;
  int count_ = 0;
  PhysRect rect_;
};

// Sites whose physical position lies in the half-open rectangle.
RegionMask rect_mask(const LatticeRegion& region, const PhysRect& rect);
RegionMask full_mask(const LatticeRegion& region);

// outer \ inner and inner; throws if inner is not contained in outer.
std::pair<RegionMask, RegionMask> annulus_masks(const LatticeRegion& region,
                                                const PhysRect& outer,
                                                const PhysRect& inner);

}  // namespace maglim
