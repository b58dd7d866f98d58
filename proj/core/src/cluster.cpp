#include "maglim/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace maglim {
namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int x, int y) { parent[find(x)] = find(y); }
};

// Union-find with an integer potential per node; uniting two nodes already in
// the same component with an inconsistent potential difference closes a cycle
// with nonzero net winding offset, i.e. a circuit around the hole.
struct WindingDsu {
  std::vector<int> parent;
  std::vector<int> pot;  // potential relative to parent
  explicit WindingDsu(int n) : parent(n), pot(n, 0) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  // Returns (root, potential relative to root). Iterative two-pass with full
  // path compression.
  std::pair<int, int> find(int x) {
    static thread_local std::vector<int> path;
    path.clear();
    int r = x;
    while (parent[r] != r) {
      path.push_back(r);
      r = parent[r];
    }
    int acc = 0;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      acc += pot[*it];
      parent[*it] = r;
      pot[*it] = acc;
    }
    return {r, acc};
  }
  // Edge u -> v with winding offset d (pot(v) = pot(u) + d).
  // Returns true iff this closes a winding cycle.
  bool unite(int u, int v, int d) {
    auto [ru, pu] = find(u);
    auto [rv, pv] = find(v);
    if (ru == rv) return pu + d != pv;
    parent[rv] = ru;
    pot[rv] = pu + d - pv;
    return false;
  }
};

}  // namespace

const ClusterInfo& ClusterDecomposition::cluster_of(int site) const {
  int lab = label[site];
  auto it = std::lower_bound(clusters.begin(), clusters.end(), lab,
                             [](const ClusterInfo& c, int l) { return c.label < l; });
  return *it;
}

ClusterDecomposition decompose(const FkConfig& fk, const LatticeRegion& region,
                               double a) {
  const int n = region.num_sites();
  const int bvert = n, gvert = n + 1;
  Dsu dsu(n + 2);
  for (int e = 0; e < region.num_edges(); ++e) {
    if (!fk.open[e]) continue;
    auto [x, y] = region.edge_sites(e);
    dsu.unite(x, y);
  }
  if (fk.wired)
    for (int x = 0; x < n; ++x)
      if (fk.bnd[x]) dsu.unite(x, bvert);
  for (int x = 0; x < n; ++x)
    if (fk.tau[x]) dsu.unite(x, gvert);

  ClusterDecomposition out;
  out.a = a;
  out.label.assign(n, -1);
  const double r = renormalization_factor(a);

  // Canonical label: smallest site index per component.
  std::vector<int> canon(n + 2, -1);
  for (int s = 0; s < n; ++s) {
    int root = dsu.find(s);
    if (canon[root] < 0) canon[root] = s;
  }
  int rb = dsu.find(bvert), rg = dsu.find(gvert);
  std::unordered_map<int, int> slot;  // canonical label -> cluster index
  for (int s = 0; s < n; ++s) {
    int root = dsu.find(s);
    int lab = canon[root];
    out.label[s] = lab;
    auto it = slot.find(lab);
    if (it == slot.end()) {
      it = slot.emplace(lab, int(out.clusters.size())).first;
      ClusterInfo c;
      c.label = lab;
      c.touches_boundary = fk.wired && root == rb;
      c.ghost = root == rg;  // only sites united with the ghost share its root
      c.min_i = c.max_i = region.col(s);
      c.min_j = c.max_j = region.row(s);
      out.clusters.push_back(c);
    }
    ClusterInfo& c = out.clusters[it->second];
    c.size += 1;
    c.min_i = std::min(c.min_i, region.col(s));
    c.max_i = std::max(c.max_i, region.col(s));
    c.min_j = std::min(c.min_j, region.row(s));
    c.max_j = std::max(c.max_j, region.row(s));
  }
  for (auto& c : out.clusters) c.area = r * c.size;
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const ClusterInfo& x, const ClusterInfo& y) { return x.label < y.label; });
  return out;
}

double ghost_connected_mass(const ClusterDecomposition& decomp) {
  double mass = 0.0;
  for (const auto& c : decomp.clusters)
    if (c.ghost) mass += c.area;
  return mass;
}

AnnulusSpec AnnulusSpec::from_phys(const LatticeRegion& region, const PhysRect& outer,
                                   const PhysRect& inner) {
  auto lo = [&](double v, double o) {
    return int(std::ceil((v - o) / region.spacing() - 1e-9));
  };
  AnnulusSpec s;
  s.ox0 = lo(outer.x0, region.origin_x());
  s.oy0 = lo(outer.y0, region.origin_y());
  s.ox1 = lo(outer.x1, region.origin_x());
  s.oy1 = lo(outer.y1, region.origin_y());
  s.ix0 = lo(inner.x0, region.origin_x());
  s.iy0 = lo(inner.y0, region.origin_y());
  s.ix1 = lo(inner.x1, region.origin_x());
  s.iy1 = lo(inner.y1, region.origin_y());
  return s;
}

AnnulusSpec AnnulusSpec::centered(const LatticeRegion& region, int outer_sites,
                                  int inner_sites) {
  AnnulusSpec s;
  s.ox0 = (region.width() - outer_sites) / 2;
  s.oy0 = (region.height() - outer_sites) / 2;
  s.ox1 = s.ox0 + outer_sites;
  s.oy1 = s.oy0 + outer_sites;
  s.ix0 = (region.width() - inner_sites) / 2;
  s.iy0 = (region.height() - inner_sites) / 2;
  s.ix1 = s.ix0 + inner_sites;
  s.iy1 = s.iy0 + inner_sites;
  return s;
}

namespace {

inline bool in_annulus(const AnnulusSpec& a, int i, int j) {
  if (i < a.ox0 || i >= a.ox1 || j < a.oy0 || j >= a.oy1) return false;
  return !(i >= a.ix0 && i < a.ix1 && j >= a.iy0 && j < a.iy1);
}

// Winding center: a point inside the hole, off every edge line.
inline std::pair<double, double> winding_center(const AnnulusSpec& a) {
  return {(a.ix0 + a.ix1 - 1) / 2.0 + 0.25, (a.iy0 + a.iy1 - 1) / 2.0 + 0.25};
}

// Shared primal-winding pass. Returns winding roots via out parameter when
// requested, else stops at the first winding cycle.
bool primal_winding(const FkConfig& fk, const LatticeRegion& region,
                    const AnnulusSpec& a, std::vector<int>* winding_sites) {
  if (a.degenerate()) return false;
  auto [cx, cy] = winding_center(a);
  const int slit_row = int(std::floor(cy));  // vertical edges j -> j+1 crossing cy
  const int W = region.width();
  WindingDsu dsu(region.num_sites());
  bool found = false;
  std::vector<std::pair<int, int>> winding_edges;
  for (int j = a.oy0; j < a.oy1; ++j) {
    for (int i = a.ox0; i < a.ox1; ++i) {
      if (!in_annulus(a, i, j)) continue;
      int x = region.index(i, j);
      if (i + 1 < a.ox1 && in_annulus(a, i + 1, j) && fk.open[region.hedge(i, j)]) {
        if (dsu.unite(x, x + 1, 0)) {
          found = true;
          winding_edges.push_back({x, x + 1});
        }
      }
      if (j + 1 < a.oy1 && in_annulus(a, i, j + 1) && fk.open[region.vedge(i, j)]) {
        int d = (j == slit_row && i > cx) ? 1 : 0;
        if (dsu.unite(x, x + W, d)) {
          found = true;
          winding_edges.push_back({x, x + W});
        }
        if (found && !winding_sites) return true;
      }
      if (found && !winding_sites) return true;
    }
  }
  if (found && winding_sites) {
    std::vector<uint8_t> is_winding_root(region.num_sites(), 0);
    for (auto& [u, v] : winding_edges) is_winding_root[dsu.find(u).first] = 1;
    for (int j = a.oy0; j < a.oy1; ++j)
      for (int i = a.ox0; i < a.ox1; ++i) {
        if (!in_annulus(a, i, j)) continue;
        int x = region.index(i, j);
        if (is_winding_root[dsu.find(x).first]) winding_sites->push_back(x);
      }
  }
  return found;
}

}  // namespace

bool open_circuit(const FkConfig& fk, const LatticeRegion& region,
                  const AnnulusSpec& annulus) {
  return primal_winding(fk, region, annulus, nullptr);
}

std::vector<int> open_circuit_sites(const FkConfig& fk, const LatticeRegion& region,
                                    const AnnulusSpec& annulus) {
  std::vector<int> sites;
  primal_winding(fk, region, annulus, &sites);
  return sites;
}

bool dual_circuit(const FkConfig& fk, const LatticeRegion& region,
                  const AnnulusSpec& a) {
  if (a.degenerate()) return false;
  auto [cx, cy] = winding_center(a);
  // Dual vertices: plaquettes p(i,j) with corners (i,j)..(i+1,j+1), indexed on
  // a (W-1) x (H-1) grid, restricted to the annulus and excluding plaquettes
  // fully inside the hole.
  const int pw = region.width() - 1;
  auto pin = [&](int i, int j) {
    if (i < a.ox0 || i + 1 >= a.ox1 || j < a.oy0 || j + 1 >= a.oy1) return false;
    return !(i >= a.ix0 && i + 1 <= a.ix1 - 1 && j >= a.iy0 && j + 1 <= a.iy1 - 1);
  };
  auto pid = [&](int i, int j) { return j * pw + i; };
  WindingDsu dsu(pw * (region.height() - 1));
  for (int j = a.oy0; j + 1 < a.oy1; ++j) {
    for (int i = a.ox0; i + 1 < a.ox1; ++i) {
      if (!pin(i, j)) continue;
      // dual horizontal edge p(i,j)-p(i+1,j): crosses primal vedge(i+1, j)
      if (pin(i + 1, j) && !fk.open[region.vedge(i + 1, j)]) {
        if (dsu.unite(pid(i, j), pid(i + 1, j), 0)) return true;
      }
      // dual vertical edge p(i,j)-p(i,j+1): crosses primal hedge(i, j+1);
      // it spans y in (j+0.5, j+1.5) at x = i+0.5.
      if (pin(i, j + 1) && !fk.open[region.hedge(i, j + 1)]) {
        int d = (j + 0.5 < cy && cy < j + 1.5 && i + 0.5 > cx) ? 1 : 0;
        if (dsu.unite(pid(i, j), pid(i, j + 1), d)) return true;
      }
    }
  }
  return false;
}

bool dual_radial_crossing(const FkConfig& fk, const LatticeRegion& region,
                          const AnnulusSpec& a) {
  if (a.degenerate()) return false;
  const int pw = region.width() - 1;
  auto pin = [&](int i, int j) {
    if (i < a.ox0 || i + 1 >= a.ox1 || j < a.oy0 || j + 1 >= a.oy1) return false;
    return !(i >= a.ix0 && i + 1 <= a.ix1 - 1 && j >= a.iy0 && j + 1 <= a.iy1 - 1);
  };
  auto pid = [&](int i, int j) { return j * pw + i; };
  const int inner_node = pw * (region.height() - 1);
  const int outer_node = inner_node + 1;
  Dsu dsu(inner_node + 2);
  auto touches_hole = [&](int i, int j) {
    // some corner of the plaquette is an inner site
    for (int di = 0; di <= 1; ++di)
      for (int dj = 0; dj <= 1; ++dj)
        if (i + di >= a.ix0 && i + di < a.ix1 && j + dj >= a.iy0 && j + dj < a.iy1)
          return true;
    return false;
  };
  for (int j = a.oy0; j + 1 < a.oy1; ++j) {
    for (int i = a.ox0; i + 1 < a.ox1; ++i) {
      if (!pin(i, j)) continue;
      if (touches_hole(i, j)) dsu.unite(pid(i, j), inner_node);
      if (i == a.ox0 || i + 2 == a.ox1 || j == a.oy0 || j + 2 == a.oy1)
        dsu.unite(pid(i, j), outer_node);
      if (pin(i + 1, j) && !fk.open[region.vedge(i + 1, j)])
        dsu.unite(pid(i, j), pid(i + 1, j));
      if (pin(i, j + 1) && !fk.open[region.hedge(i, j + 1)])
        dsu.unite(pid(i, j), pid(i, j + 1));
    }
  }
  return dsu.find(inner_node) == dsu.find(outer_node);
}

bool rect_crossing(const FkConfig& fk, const LatticeRegion& region, int x0, int y0,
                   int x1, int y1) {
  const int W = region.width();
  const int left = region.num_sites(), right = left + 1;
  Dsu dsu(region.num_sites() + 2);
  for (int j = y0; j < y1; ++j) {
    for (int i = x0; i < x1; ++i) {
      int x = region.index(i, j);
      if (i == x0) dsu.unite(x, left);
      if (i == x1 - 1) dsu.unite(x, right);
      if (i + 1 < x1 && fk.open[region.hedge(i, j)]) dsu.unite(x, x + 1);
      if (j + 1 < y1 && fk.open[region.vedge(i, j)]) dsu.unite(x, x + W);
    }
  }
  return dsu.find(left) == dsu.find(right);
}

AnnulusEventReport annulus_events(const FkConfig& fk, const LatticeRegion& region,
                                  const AnnulusSpec& annulus) {
  AnnulusEventReport rep;
  rep.annulus = annulus;
  auto sites = open_circuit_sites(fk, region, annulus);
  rep.open_circuit_present = !sites.empty();
  rep.dual_circuit_present = dual_circuit(fk, region, annulus);
  if (rep.open_circuit_present) {
    auto decomp = decompose(fk, region, 1.0);
    for (int s : sites)
      if (decomp.cluster_of(s).ghost) {
        rep.circuit_ghost_connected = true;
        break;
      }
  }
  return rep;
}

int mesoscopic_scan(const ClusterDecomposition& decomp, const LatticeRegion& region,
                    double eps, double mass_window) {
  const double a = decomp.a;
  if (mass_window <= 1.0) throw std::invalid_argument("mesoscopic_scan: M must be > 1");
  double kf = eps / a;
  int k = int(std::lround(kf));
  if (k < 1 || std::abs(kf - k) > 1e-9 || region.width() % k != 0 ||
      region.height() % k != 0)
    throw std::invalid_argument("mesoscopic_scan: eps must tile the region");
  const int nx = region.width() / k, ny = region.height() / k;
  const double lo = std::pow(eps, 15.0 / 8.0) / mass_window;
  const double hi = std::pow(eps, 15.0 / 8.0) * mass_window;

  std::vector<uint8_t> good(size_t(nx) * ny, 0);
  for (const auto& c : decomp.clusters) {
    if (c.area < lo || c.area > hi) continue;
    int sx = c.min_i / k, sy = c.min_j / k;
    if (c.max_i / k != sx || c.max_j / k != sy) continue;  // spans squares
    // interior: cluster avoids the square's outermost site layer
    if (c.min_i < sx * k + 1 || c.max_i > sx * k + k - 2) continue;
    if (c.min_j < sy * k + 1 || c.max_j > sy * k + k - 2) continue;
    good[size_t(sy) * nx + sx] = 1;
  }
  int count = 0;
  for (uint8_t g : good) count += g;
  return count;
}

int mesoscopic_scan(const FkConfig& fk, const LatticeRegion& region, double a,
                    double eps, double mass_window) {
  return mesoscopic_scan(decompose(fk, region, a), region, eps, mass_window);
}

void write_cluster_summary(std::ostream& os, int snapshot,
                           const ClusterDecomposition& decomp) {
  for (const auto& c : decomp.clusters)
    os << snapshot << "," << c.label << "," << c.size << "," << c.area << ","
       << int(c.touches_boundary) << "," << int(c.ghost) << "\n";
}

}  // namespace maglim
