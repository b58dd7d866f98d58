#include "maglim/lattice.hpp"

#include <stdexcept>

namespace maglim {

double renormalization_factor(double a) {
  if (a <= 0.0) throw std::invalid_argument("renormalization_factor: a must be > 0");
  return std::pow(a, 15.0 / 8.0);
}

const char* bc_name(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Plus: return "plus";
    case BoundaryCondition::Minus: return "minus";
    default: return "free";
  }
}

BoundaryCondition bc_from_name(const std::string& name) {
  if (name == "plus" || name == "+") return BoundaryCondition::Plus;
  if (name == "minus" || name == "-") return BoundaryCondition::Minus;
  if (name == "free") return BoundaryCondition::Free;
  throw std::invalid_argument("unknown boundary condition: " + name);
}

LatticeRegion::LatticeRegion(int width, int height, double a, double ox, double oy)
    : width_(width), height_(height), a_(a), ox_(ox), oy_(oy) {
  if (width < 1 || height < 1) throw std::invalid_argument("region dimensions must be >= 1");
  if (a <= 0.0) throw std::invalid_argument("lattice spacing must be > 0");
}

std::pair<int, int> LatticeRegion::edge_sites(int e) const {
  if (is_hedge(e)) {
    int i = e % (width_ - 1), j = e / (width_ - 1);
    return {index(i, j), index(i + 1, j)};
  }
  int v = e - num_hedges();
  int i = v % width_, j = v / width_;
  return {index(i, j), index(i, j + 1)};
}

LatticeRegion build_region(int width, int height, double a, double ox, double oy) {
  return LatticeRegion(width, height, a, ox, oy);
}

RegionMask rect_mask(const LatticeRegion& region, const PhysRect& rect) {
  RegionMask mask(region.num_sites());
  mask.set_rect(rect);
  for (int s = 0; s < region.num_sites(); ++s) {
    double x = region.pos_x(s), y = region.pos_y(s);
    if (x >= rect.x0 && x < rect.x1 && y >= rect.y0 && y < rect.y1) mask.set(s);
  }
  return mask;
}

RegionMask full_mask(const LatticeRegion& region) {
  RegionMask mask(region.num_sites());
  for (int s = 0; s < region.num_sites(); ++s) mask.set(s);
  mask.set_rect({region.origin_x(), region.origin_y(),
                 region.origin_x() + region.extent_x(),
                 region.origin_y() + region.extent_y()});
  return mask;
}

std::pair<RegionMask, RegionMask> annulus_masks(const LatticeRegion& region,
                                                const PhysRect& outer,
                                                const PhysRect& inner) {
  if (inner.x0 < outer.x0 || inner.y0 < outer.y0 || inner.x1 > outer.x1 ||
      inner.y1 > outer.y1)
    throw std::invalid_argument("annulus_masks: inner rectangle not contained in outer");
  RegionMask outer_mask = rect_mask(region, outer);
  RegionMask inner_mask = rect_mask(region, inner);
  RegionMask annulus(region.num_sites());
  annulus.set_rect(outer);
  for (int s = 0; s < region.num_sites(); ++s)
    if (outer_mask.test(s) && !inner_mask.test(s)) annulus.set(s);
  return {annulus, inner_mask};
}

}  // namespace maglim
