#include "maglim/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "maglim/cluster.hpp"
#include "maglim/exact.hpp"
#include "maglim/observables.hpp"
#include "maglim/rng.hpp"
#include "maglim/util.hpp"

namespace maglim {

namespace {

// C-infinity bump on (0,1), normalized to 1 at the midpoint.
double bump1d(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return std::exp(4.0 - 1.0 / (u * (1.0 - u)));
}

double profile(int p, double u, double v) {
  double b = bump1d(u) * bump1d(v);
  switch (p) {
    case 0: return b;
    case 1: return b * (2.0 * u - 1.0);
    default: return b * (2.0 * u - 1.0) * (2.0 * v - 1.0);
  }
}

}  // namespace

TestFamily::TestFamily(double support_side) : side_(support_side) {
  if (support_side <= 0.0) throw std::invalid_argument("TestFamily: side must be positive");
}

std::vector<double> TestFamily::sample(const LatticeRegion& region, int j) const {
  if (j < 0 || j >= size()) throw std::invalid_argument("TestFamily: index out of range");
  if (side_ > region.extent_x() + 1e-12 || side_ > region.extent_y() + 1e-12)
    throw std::invalid_argument("TestFamily: support exceeds region");
  // j = (scale-1)*12 + translation*3 + profile
  const int scale = j / 12 + 1;
  const int trans = (j % 12) / 3;
  const int prof = j % 3;
  const double s = side_ / std::pow(2.0, scale);  // box side at this scale
  // Family origin: lower-left corner of the centered support square.
  const double cx = region.origin_x() + 0.5 * region.extent_x();
  const double cy = region.origin_y() + 0.5 * region.extent_y();
  const double fx = cx - 0.5 * side_ + (trans & 1) * s;
  const double fy = cy - 0.5 * side_ + (trans >> 1) * s;

  // Each site represents the cell [x, x+a) x [y, y+a); sample the profile at
  // cell centers so single-cell boxes still see an interior point.
  const double half = 0.5 * region.spacing();
  std::vector<double> f(region.num_sites(), 0.0);
  for (int site = 0; site < region.num_sites(); ++site) {
    double u = (region.pos_x(site) + half - fx) / s;
    double v = (region.pos_y(site) + half - fy) / s;
    if (u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0) f[site] = profile(prof, u, v);
  }
  return f;
}

std::vector<double> pairing_vector(const SpinConfig& spin, const LatticeRegion& region,
                                   double a, const TestFamily& family) {
  std::vector<double> out(family.size());
  for (int j = 0; j < family.size(); ++j)
    out[j] = pair_field(spin, family.sample(region, j), a);
  return out;
}

namespace {

// Energy distance (V-statistic form) over the component range [lo, hi):
// 2 E||X-Y|| - E||X-X'|| - E||Y-Y'||; exactly 0 for identical sample sets.
double energy_distance_block(const std::vector<std::vector<double>>& xs,
                             const std::vector<std::vector<double>>& ys, int lo, int hi) {
  auto dist = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double d2 = 0.0;
    for (int k = lo; k < hi; ++k) d2 += (u[k] - v[k]) * (u[k] - v[k]);
    return std::sqrt(d2);
  };
  const size_t n = xs.size(), m = ys.size();
  double axy = 0.0, axx = 0.0, byy = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < m; ++j) axy += dist(xs[i], ys[j]);
  axy /= double(n) * double(m);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) axx += dist(xs[i], xs[j]);
  axx /= double(n) * double(n);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) byy += dist(ys[i], ys[j]);
  byy /= double(m) * double(m);
  return std::max(2.0 * axy - axx - byy, 0.0);
}

}  // namespace

DistanceReport pairing_energy_distance(const std::vector<std::vector<double>>& xs,
                                       const std::vector<std::vector<double>>& ys,
                                       const TestFamily& family) {
  if (xs.empty() || ys.empty())
    throw std::invalid_argument("pairing_energy_distance: empty sample");
  DistanceReport rep;
  for (int k = 1; k <= 4; ++k) {
    int lo = (k - 1) * 12, hi = k * 12;
    double d = energy_distance_block(xs, ys, lo, hi);
    // spread over sample quarters, for an error scale
    std::vector<double> qd;
    size_t qx = xs.size() / 4, qy = ys.size() / 4;
    if (qx >= 8 && qy >= 8) {
      for (int q = 0; q < 4; ++q) {
        std::vector<std::vector<double>> sx(xs.begin() + q * qx, xs.begin() + (q + 1) * qx);
        std::vector<std::vector<double>> sy(ys.begin() + q * qy, ys.begin() + (q + 1) * qy);
        qd.push_back(energy_distance_block(sx, sy, lo, hi));
      }
    }
    double err = 0.0;
    if (qd.size() == 4) {
      double m = (qd[0] + qd[1] + qd[2] + qd[3]) / 4.0;
      double v = 0.0;
      for (double x : qd) v += (x - m) * (x - m);
      err = std::sqrt(v / 3.0) / 2.0;
    }
    rep.per_scale.push_back(d);
    rep.per_scale_err.push_back(err);
    double w = std::min(std::pow(2.0, -k), 1.0);
    rep.total += w * std::min(d, 1.0);
    rep.total_err += (d < 1.0 ? w * err : 0.0) * (d < 1.0 ? w * err : 0.0);
  }
  rep.total_err = std::sqrt(rep.total_err);
  return rep;
}

namespace {

std::vector<std::vector<double>> sample_pairings(const LatticeRegion& region,
                                                 const ModelParams& params,
                                                 const TestFamily& family,
                                                 const ChainSpec& spec, int n_chains) {
  // Pre-sample the family once; pairing per snapshot is then a dot product.
  std::vector<std::vector<double>> fs(family.size());
  for (int j = 0; j < family.size(); ++j) fs[j] = family.sample(region, j);
  std::vector<std::vector<std::vector<double>>> per_chain(n_chains);
  parallel_for(n_chains, [&](int64_t c) {
    run_chain(region, BoundaryCondition::Plus, params, spec, uint64_t(c),
              [&](const SpinConfig& spin, const FkConfig*) {
                std::vector<double> v(fs.size());
                for (size_t j = 0; j < fs.size(); ++j)
                  v[j] = pair_field(spin, fs[j], params.a);
                per_chain[c].push_back(std::move(v));
              });
  });
  std::vector<std::vector<double>> out;
  for (auto& pc : per_chain)
    for (auto& v : pc) out.push_back(std::move(v));
  return out;
}

}  // namespace

DistanceReport nested_field_distance(double h, double a, int l_small_sites,
                                     int l_big_sites, const TestFamily& family,
                                     const ChainSpec& spec, int n_chains) {
  if (l_small_sites > l_big_sites)
    throw std::invalid_argument("nested_field_distance: small box exceeds big box");
  if (family.support_side() > l_small_sites * a + 1e-12)
    throw std::invalid_argument("nested_field_distance: family support exceeds small box");
  LatticeRegion small = build_region(l_small_sites, l_small_sites, a);
  LatticeRegion big = build_region(l_big_sites, l_big_sites, a);
  ModelParams params = ModelParams::critical(h, a);
  ChainSpec spec_big = spec;
  spec_big.seed = spec.seed + 0x517cc1b727220a95ULL;  // decorrelate the two ensembles
  auto xs = sample_pairings(small, params, family, spec, n_chains);
  auto ys = sample_pairings(big, params, family, spec_big, n_chains);
  return pairing_energy_distance(xs, ys, family);
}

AnnulusMatchReport annulus_matching_probability(double h, double a, int box_sites,
                                                int outer_sites, int inner_sites,
                                                const ChainSpec& spec, int n_chains) {
  LatticeRegion region = build_region(box_sites, box_sites, a);
  AnnulusSpec ann = AnnulusSpec::centered(region, outer_sites, inner_sites);
  ModelParams params = ModelParams::critical(h, a);
  ChainSpec sw = spec;
  sw.algorithm = Algorithm::SwendsenWang;
  std::vector<std::vector<double>> circ(n_chains), gh(n_chains), joint(n_chains);
  parallel_for(n_chains, [&](int64_t c) {
    run_chain(region, BoundaryCondition::Plus, params, sw, uint64_t(c),
              [&](const SpinConfig&, const FkConfig* fk) {
                auto ev = annulus_events(*fk, region, ann);
                circ[c].push_back(ev.open_circuit_present ? 1.0 : 0.0);
                gh[c].push_back(ev.circuit_ghost_connected ? 1.0 : 0.0);
                joint[c].push_back(
                    ev.open_circuit_present && ev.circuit_ghost_connected ? 1.0 : 0.0);
              });
  });
  AnnulusMatchReport rep;
  rep.circuit = combine_chain_series(circ);
  rep.ghost = combine_chain_series(gh);
  rep.joint = combine_chain_series(joint);
  return rep;
}

double GrandCouplingResult::failure_rate() const {
  if (traces.empty()) return 0.0;
  int64_t fail = 0;
  for (const auto& t : traces) fail += t.success() ? 0 : 1;
  return double(fail) / double(traces.size());
}

int64_t GrandCouplingResult::total_ordering_violations() const {
  int64_t v = 0;
  for (const auto& t : traces) v += t.ordering_violations;
  return v;
}

namespace {

// One half of the shared-tape pair: lattice, spins, FK bonds, and the offset
// of its lower-left site in plane coordinates.
struct PairedConfig {
  LatticeRegion region;
  std::vector<int8_t> spin;
  FkConfig fk;
  int off = 0;  // embedding offset (same in x and y)
};

// One lock-step Swendsen-Wang sweep of both configurations. Bond and ghost
// uniforms are addressed by absolute plane coordinates so co-located edges
// see the same randomness; cluster coins are addressed by the cluster's
// minimal site in plane coordinates.
void paired_sw_sweep(PairedConfig& cfg, const LatticeRegion& plane,
                     const ModelParams& params, uint64_t sweep, uint64_t kb,
                     uint64_t kg, uint64_t kw, uint64_t kf) {
  const LatticeRegion& r = cfg.region;
  const int n = r.num_sites();
  const double p = 1.0 - std::exp(-2.0 * params.beta);
  const double pg = params.h_site() > 0.0 ? 1.0 - std::exp(-2.0 * params.h_site()) : 0.0;
  const uint64_t ep = uint64_t(plane.num_edges());
  const uint64_t np = uint64_t(plane.num_sites());

  auto plane_site = [&](int site) {
    return plane.index(r.col(site) + cfg.off, r.row(site) + cfg.off);
  };
  auto plane_edge = [&](int e) {
    auto [s0, s1] = r.edge_sites(e);
    int i = r.col(s0) + cfg.off, j = r.row(s0) + cfg.off;
    return r.is_hedge(e) ? plane.hedge(i, j) : plane.vedge(i, j);
  };

  cfg.fk.open.assign(r.num_edges(), 0);
  cfg.fk.tau.assign(n, 0);
  cfg.fk.bnd.assign(n, 0);
  cfg.fk.wired = true;

  // bonds
  for (int e = 0; e < r.num_edges(); ++e) {
    auto [s0, s1] = r.edge_sites(e);
    if (cfg.spin[s0] == cfg.spin[s1] &&
        CounterRng::uniform_at(kb, sweep * ep + uint64_t(plane_edge(e))) < p)
      cfg.fk.open[e] = 1;
  }
  // ghost edges (tau): pinned to +1
  if (pg > 0.0) {
    for (int s = 0; s < n; ++s)
      if (cfg.spin[s] == 1 &&
          CounterRng::uniform_at(kg, sweep * np + uint64_t(plane_site(s))) < pg)
        cfg.fk.tau[s] = 1;
  }
  // boundary wiring under Plus bc: one bond per missing neighbor
  for (int s = 0; s < n; ++s) {
    int nb = r.boundary_bonds(s);
    if (nb == 0 || cfg.spin[s] != 1) continue;
    for (int slot = 0; slot < nb; ++slot)
      if (CounterRng::uniform_at(kw, (sweep * np + uint64_t(plane_site(s))) * 4 +
                                         uint64_t(slot)) < p) {
        cfg.fk.bnd[s] = 1;
        break;
      }
  }

  // components over n sites + boundary vertex n + ghost vertex n+1
  std::vector<int> parent(n + 2);
  for (int i = 0; i < n + 2; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (int e = 0; e < r.num_edges(); ++e)
    if (cfg.fk.open[e]) {
      auto [s0, s1] = r.edge_sites(e);
      unite(s0, s1);
    }
  for (int s = 0; s < n; ++s) {
    if (cfg.fk.bnd[s]) unite(s, n);
    if (cfg.fk.tau[s]) unite(s, n + 1);
  }

  // flips: pinned clusters -> +1 (Plus bc and ghost agree); free clusters get
  // a coin addressed by their minimal site in plane coordinates
  int rb = find(n), rg = find(n + 1);
  std::vector<int8_t> sign(n + 2, 0);
  for (int s = 0; s < n; ++s) {
    int root = find(s);
    if (sign[root] == 0) {
      if (root == rb || root == rg)
        sign[root] = 1;
      else
        sign[root] =
            CounterRng::uniform_at(kf, sweep * np + uint64_t(plane_site(s))) < 0.5 ? 1 : -1;
    }
    cfg.spin[s] = sign[root];
  }
}

}  // namespace

GrandCouplingResult grand_coupling_run(double h, double a, int l1_sites, int l2_sites,
                                       int n_runs, const ChainSpec& spec) {
  if (l1_sites > l2_sites) throw std::invalid_argument("grand_coupling_run: L1 > L2");
  // ratio-4 annuli A_{L2/4, L2}, A_{L2/16, L2/4}, ... down to L1
  std::vector<std::pair<int, int>> annuli;  // (outer, inner) in sites
  for (int outer = l2_sites; outer / 4 >= l1_sites && outer % 4 == 0; outer /= 4)
    annuli.emplace_back(outer, outer / 4);
  if (annuli.empty())
    throw std::invalid_argument("grand_coupling_run: no ratio-4 annulus between L1 and L2");

  const int plane_sites = 4 * l2_sites;
  LatticeRegion plane_region = build_region(plane_sites, plane_sites, a);
  LatticeRegion box_region = build_region(l2_sites, l2_sites, a);
  ModelParams params = ModelParams::critical(h, a);

  GrandCouplingResult result;
  result.n_annuli = int(annuli.size());
  result.traces.resize(n_runs);

  parallel_for(n_runs, [&](int64_t run) {
    uint64_t base = CounterRng::stream(spec.seed, uint64_t(run)).key();
    uint64_t kb = CounterRng::stream(base, 0).key();
    uint64_t kg = CounterRng::stream(base, 1).key();
    uint64_t kw = CounterRng::stream(base, 2).key();
    uint64_t kf = CounterRng::stream(base, 3).key();
    uint64_t kw2 = CounterRng::stream(base, 4).key();  // plane's own wiring tape

    PairedConfig box{box_region, std::vector<int8_t>(box_region.num_sites(), 1), {},
                     (plane_sites - l2_sites) / 2};
    PairedConfig pl{plane_region, std::vector<int8_t>(plane_region.num_sites(), 1), {}, 0};

    CouplingTrace trace;
    for (int64_t sw = 0; sw < spec.n_equil + 1; ++sw) {
      paired_sw_sweep(box, plane_region, params, uint64_t(sw), kb, kg, kw, kf);
      paired_sw_sweep(pl, plane_region, params, uint64_t(sw), kb, kg, kw2, kf);
    }

    // ordering check on the final bond configurations
    auto plane_edge = [&](int e) {
      auto [s0, s1] = box_region.edge_sites(e);
      int i = box_region.col(s0) + box.off, j = box_region.row(s0) + box.off;
      return box_region.is_hedge(e) ? plane_region.hedge(i, j) : plane_region.vedge(i, j);
    };
    for (int e = 0; e < box_region.num_edges(); ++e)
      if (pl.fk.open[plane_edge(e)] && !box.fk.open[e]) ++trace.ordering_violations;

    // restriction of the plane bonds/tau to box coordinates
    FkConfig plane_in_box;
    plane_in_box.open.resize(box_region.num_edges());
    plane_in_box.tau.resize(box_region.num_sites());
    plane_in_box.bnd.assign(box_region.num_sites(), 0);
    for (int e = 0; e < box_region.num_edges(); ++e)
      plane_in_box.open[e] = pl.fk.open[plane_edge(e)];
    for (int s = 0; s < box_region.num_sites(); ++s) {
      int ps = plane_region.index(box_region.col(s) + box.off, box_region.row(s) + box.off);
      plane_in_box.tau[s] = pl.fk.tau[ps];
    }
    FkConfig and_cfg = plane_in_box;
    for (int e = 0; e < box_region.num_edges(); ++e)
      and_cfg.open[e] = and_cfg.open[e] && box.fk.open[e];

    ClusterDecomposition box_decomp = decompose(box.fk, box_region, a);

    for (size_t i = 0; i < annuli.size(); ++i) {
      AnnulusSpec ann = AnnulusSpec::centered(box_region, annuli[i].first, annuli[i].second);
      AnnulusRecord rec;
      rec.index = int(i);
      rec.circuit = open_circuit(box.fk, box_region, ann) &&
                    open_circuit(plane_in_box, box_region, ann);
      auto shared_sites = open_circuit_sites(and_cfg, box_region, ann);
      rec.matched = !shared_sites.empty();
      if (rec.matched) {
        for (int s : shared_sites)
          if (box_decomp.cluster_of(s).ghost) {
            rec.ghost = true;
            break;
          }
      }
      trace.records.push_back(rec);
      if (rec.matched && rec.ghost) {
        trace.success_annulus = int(i);
        break;
      }
    }

    if (trace.success()) {
      // copy the interior so both fields agree inside the matched annulus
      int inner = annuli[trace.success_annulus].second;
      int lo = (l2_sites - inner) / 2, hi = lo + inner;
      SpinConfig box_spin{box.spin, BoundaryCondition::Plus};
      SpinConfig plane_spin{pl.spin, BoundaryCondition::Plus};
      for (int j = lo; j < hi; ++j)
        for (int i2 = lo; i2 < hi; ++i2) {
          int bs = box_region.index(i2, j);
          int ps = plane_region.index(i2 + box.off, j + box.off);
          box_spin.spins[bs] = plane_spin.spins[ps];
        }
      TestFamily fam(inner * a);
      trace.interior_box = pairing_vector(box_spin, box_region, a, fam);
      trace.interior_plane = pairing_vector(plane_spin, plane_region, a, fam);
    }
    result.traces[run] = std::move(trace);
  });
  return result;
}

void write_coupling_traces(std::ostream& os, const GrandCouplingResult& result) {
  os << "run,annulus,circuit,matched,ghost,success\n";
  for (size_t r = 0; r < result.traces.size(); ++r) {
    const auto& t = result.traces[r];
    for (const auto& rec : t.records)
      os << r << ',' << rec.index << ',' << int(rec.circuit) << ',' << int(rec.matched)
         << ',' << int(rec.ghost) << ','
         << (t.success_annulus == rec.index ? 1 : 0) << '\n';
  }
}

RnReweightReport rn_reweight_check(double h, const LatticeRegion& region,
                                   BoundaryCondition bc) {
  if (region.num_sites() > kMaxEnumSites)
    throw std::invalid_argument("rn_reweight_check: region too large to enumerate");
  ModelParams at_h = ModelParams::critical(h, region.spacing());
  ModelParams at_0 = ModelParams::critical(0.0, region.spacing());
  ExactDistribution dh = enumerate_ising(region, bc, at_h);
  ExactDistribution d0 = enumerate_ising(region, bc, at_0);
  if (dh.spin_sums != d0.spin_sums)
    throw std::runtime_error("rn_reweight_check: support mismatch");

  // reweight the h = 0 law by e^{h m}/E[e^{h m}], m = a^{15/8} S
  const double r = renormalization_factor(region.spacing());
  std::vector<double> w(d0.probs.size());
  double z = 0.0;
  for (size_t i = 0; i < d0.probs.size(); ++i) {
    w[i] = d0.probs[i] * std::exp(h * r * double(d0.spin_sums[i]));
    z += w[i];
  }
  RnReweightReport rep;
  rep.n_states = int(d0.probs.size());
  for (size_t i = 0; i < d0.probs.size(); ++i)
    rep.max_abs_diff = std::max(rep.max_abs_diff, std::fabs(w[i] / z - dh.probs[i]));
  return rep;
}

}  // namespace maglim
