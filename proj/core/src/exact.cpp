#include "maglim/exact.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace maglim {
namespace {

// Streaming log-sum-exp accumulator.
struct LogSum {
  double max_exp = -1e300;
  double scaled = 0.0;  // sum of exp(e - max_exp)

  void add(double e) {
    if (e > max_exp) {
      scaled = scaled * std::exp(max_exp - e) + 1.0;
      max_exp = e;
    } else {
      scaled += std::exp(e - max_exp);
    }
  }
  double value() const { return max_exp + std::log(scaled); }
  bool empty() const { return scaled == 0.0; }
};

struct SmallDsu {
  std::vector<int> parent;
  explicit SmallDsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int x, int y) { parent[find(x)] = find(y); }
};

}  // namespace

double ExactDistribution::prob_of(int spin_sum) const {
  auto it = std::lower_bound(spin_sums.begin(), spin_sums.end(), spin_sum);
  if (it == spin_sums.end() || *it != spin_sum) return 0.0;
  return probs[it - spin_sums.begin()];
}

double ExactDistribution::mean() const {
  double m = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) m += probs[i] * spin_sums[i];
  return m;
}

double ExactDistribution::variance() const {
  double m = mean(), v = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    double d = spin_sums[i] - m;
    v += probs[i] * d * d;
  }
  return v;
}

ExactDistribution enumerate_ising(const LatticeRegion& region, BoundaryCondition bc,
                                  const ModelParams& params) {
  const int n = region.num_sites();
  if (n > kMaxEnumSites)
    throw std::invalid_argument("enumerate_ising: region has " + std::to_string(n) +
                                " sites, ceiling is " + std::to_string(kMaxEnumSites));
  const double beta = params.beta, hs = params.h_site();
  const int sign = bc_sign(bc);

  std::vector<std::pair<int, int>> edges;
  for (int e = 0; e < region.num_edges(); ++e) edges.push_back(region.edge_sites(e));
  std::vector<int> bbonds(n, 0);
  if (sign != 0)
    for (int s = 0; s < n; ++s) bbonds[s] = region.boundary_bonds(s);

  // One log-sum-exp bucket per spin-sum value S = 2k - n, k = #up spins.
  std::vector<LogSum> buckets(n + 1);
  const uint32_t nstates = 1u << n;
  for (uint32_t state = 0; state < nstates; ++state) {
    int pop = __builtin_popcount(state);
    int S = 2 * pop - n;
    double energy = hs * S;
    for (const auto& [x, y] : edges) {
      int sx = (state >> x) & 1 ? 1 : -1;
      int sy = (state >> y) & 1 ? 1 : -1;
      energy += beta * sx * sy;
    }
    if (sign != 0)
      for (int s = 0; s < n; ++s)
        if (bbonds[s]) energy += beta * bbonds[s] * sign * (((state >> s) & 1) ? 1 : -1);
    buckets[pop].add(energy);
  }

  LogSum total;
  for (const auto& b : buckets)
    if (!b.empty()) total.add(b.value());
  double logZ = total.value();

  ExactDistribution dist;
  dist.a = params.a;
  dist.bc = bc;
  dist.log_partition = logZ;
  for (int k = 0; k <= n; ++k) {
    if (buckets[k].empty()) continue;
    dist.spin_sums.push_back(2 * k - n);
    dist.probs.push_back(std::exp(buckets[k].value() - logZ));
  }
  return dist;
}

double exact_log_mgf(const ExactDistribution& dist, double t) {
  const double r = renormalization_factor(dist.a);
  LogSum acc;
  for (size_t i = 0; i < dist.probs.size(); ++i)
    acc.add(std::log(dist.probs[i]) + t * r * dist.spin_sums[i]);
  return acc.value();
}

double exact_mgf(const ExactDistribution& dist, double t) {
  return std::exp(exact_log_mgf(dist, t));
}

std::complex<double> exact_charfn(const ExactDistribution& dist, double t) {
  const double r = renormalization_factor(dist.a);
  std::complex<double> acc = 0.0;
  for (size_t i = 0; i < dist.probs.size(); ++i) {
    double phase = t * r * dist.spin_sums[i];
    acc += dist.probs[i] * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return acc;
}

void write_distribution(std::ostream& os, const ExactDistribution& dist,
                        const LatticeRegion& region, const ModelParams& params) {
  os.precision(15);
  os << "# width=" << region.width() << " height=" << region.height()
     << " a=" << params.a << " bc=" << bc_name(dist.bc) << " beta=" << params.beta
     << " h=" << params.h << "\n";
  os << std::scientific;
  for (size_t i = 0; i < dist.probs.size(); ++i)
    os << dist.spin_sums[i] << "\t" << dist.probs[i] << "\n";
}

ExactDistribution read_distribution(std::istream& is) {
  ExactDistribution dist;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string tok;
      while (hs >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "a") dist.a = std::stod(v);
        else if (k == "bc") dist.bc = bc_from_name(v);
      }
      continue;
    }
    std::istringstream row(line);
    int S;
    double p;
    if (row >> S >> p) {
      dist.spin_sums.push_back(S);
      dist.probs.push_back(p);
    }
  }
  return dist;
}

// --- FK enumeration ---------------------------------------------------------

namespace {

// Virtual vertex ids in the augmented graph.
struct FkGraph {
  int n;            // lattice sites
  int bvert;        // boundary vertex (n), used when wired
  int gvert;        // ghost vertex (n + 1)
  bool wired;
  bool has_ghost;
};

}  // namespace

FkExactMeasure enumerate_fk(const LatticeRegion& region, BoundaryCondition bc,
                            const ModelParams& params) {
  const int n = region.num_sites();
  const double p = 1.0 - std::exp(-2.0 * params.beta);
  const double pg = 1.0 - std::exp(-2.0 * params.h_site());
  const bool wired = bc != BoundaryCondition::Free;
  const bool ghost = params.h > 0.0;

  FkExactMeasure m;
  m.region = region;
  m.bc = bc;
  m.params = params;
  for (int e = 0; e < region.num_edges(); ++e) {
    auto [x, y] = region.edge_sites(e);
    m.edges.push_back({FkEdge::Lattice, x, y, p});
  }
  if (wired)
    for (int s = 0; s < n; ++s)
      for (int b = 0; b < region.boundary_bonds(s); ++b)
        m.edges.push_back({FkEdge::Boundary, s, -1, p});
  if (ghost)
    for (int s = 0; s < n; ++s) m.edges.push_back({FkEdge::Ghost, s, -1, pg});

  const int ne = m.num_edges();
  if (ne > kMaxEnumEdges)
    throw std::invalid_argument("enumerate_fk: graph has " + std::to_string(ne) +
                                " edges, ceiling is " + std::to_string(kMaxEnumEdges));

  const int bvert = n, gvert = n + 1;
  m.config_probs.assign(size_t(1) << ne, 0.0);
  double total = 0.0;
  for (uint32_t cfg = 0; cfg < (1u << ne); ++cfg) {
    double w = 1.0;
    SmallDsu dsu(n + 2);
    for (int e = 0; e < ne; ++e) {
      const FkEdge& ed = m.edges[e];
      if ((cfg >> e) & 1) {
        w *= ed.p;
        int other = ed.kind == FkEdge::Lattice ? ed.b
                    : ed.kind == FkEdge::Boundary ? bvert
                                                  : gvert;
        dsu.unite(ed.a, other);
      } else {
        w *= 1.0 - ed.p;
      }
    }
    // Minus bc: the boundary vertex is pinned to -1 and the ghost to +1,
    // so configurations connecting them have no consistent coloring.
    if (bc == BoundaryCondition::Minus && ghost && dsu.find(bvert) == dsu.find(gvert))
      continue;
    // Cluster weight 2 per cluster containing neither pinned vertex.
    int rb = dsu.find(bvert), rg = dsu.find(gvert);
    std::vector<int> seen;
    for (int s = 0; s < n; ++s) {
      int r = dsu.find(s);
      if ((wired && r == rb) || (ghost && r == rg)) continue;
      if (std::find(seen.begin(), seen.end(), r) == seen.end()) seen.push_back(r);
    }
    w *= std::pow(2.0, int(seen.size()));
    m.config_probs[cfg] = w;
    total += w;
  }
  for (auto& w : m.config_probs) w /= total;
  return m;
}

double FkExactMeasure::edge_marginal(int e) const {
  double pr = 0.0;
  for (uint32_t cfg = 0; cfg < config_probs.size(); ++cfg)
    if ((cfg >> e) & 1) pr += config_probs[cfg];
  return pr;
}

std::vector<double> FkExactMeasure::lattice_bond_distribution() const {
  int nl = region.num_edges();
  std::vector<double> out(size_t(1) << nl, 0.0);
  uint32_t mask = (1u << nl) - 1;
  for (uint32_t cfg = 0; cfg < config_probs.size(); ++cfg)
    out[cfg & mask] += config_probs[cfg];
  return out;
}

double FkExactMeasure::mean_ghost_mass() const {
  const int n = region.num_sites();
  const int bvert = n, gvert = n + 1;
  const double r = renormalization_factor(params.a);
  double acc = 0.0;
  for (uint32_t cfg = 0; cfg < config_probs.size(); ++cfg) {
    if (config_probs[cfg] == 0.0) continue;
    SmallDsu dsu(n + 2);
    for (int e = 0; e < num_edges(); ++e) {
      if (!((cfg >> e) & 1)) continue;
      const FkEdge& ed = edges[e];
      int other = ed.kind == FkEdge::Lattice ? ed.b
                  : ed.kind == FkEdge::Boundary ? bvert
                                                : gvert;
      dsu.unite(ed.a, other);
    }
    int rg = dsu.find(gvert);
    int cnt = 0;
    for (int s = 0; s < n; ++s)
      if (dsu.find(s) == rg) ++cnt;
    acc += config_probs[cfg] * r * cnt;
  }
  return acc;
}

ExactDistribution FkExactMeasure::spin_marginal() const {
  const int n = region.num_sites();
  const int bvert = n, gvert = n + 1;
  const bool wired = bc != BoundaryCondition::Free;
  const bool ghost = params.h > 0.0;
  const int sign = bc_sign(bc);

  // Distribution over S accumulated across bond configurations; S = offset - n
  // indexing into a vector of size 2n + 1 stepping by 2.
  std::vector<double> law(2 * n + 1, 0.0);
  for (uint32_t cfg = 0; cfg < config_probs.size(); ++cfg) {
    double w = config_probs[cfg];
    if (w == 0.0) continue;
    SmallDsu dsu(n + 2);
    for (int e = 0; e < num_edges(); ++e) {
      if (!((cfg >> e) & 1)) continue;
      const FkEdge& ed = edges[e];
      int other = ed.kind == FkEdge::Lattice ? ed.b
                  : ed.kind == FkEdge::Boundary ? bvert
                                                : gvert;
      dsu.unite(ed.a, other);
    }
    int rb = dsu.find(bvert), rg = dsu.find(gvert);
    std::map<int, int> cluster_size;
    for (int s = 0; s < n; ++s) cluster_size[dsu.find(s)] += 1;

    int pinned_sum = 0;
    std::vector<int> free_sizes;
    for (auto& [root, size] : cluster_size) {
      if (ghost && root == rg) pinned_sum += size;          // ghost cluster -> +1
      else if (wired && root == rb) pinned_sum += sign * size;  // boundary cluster
      else free_sizes.push_back(size);
    }
    // Convolve fair-coin cluster signs.
    std::vector<double> conv{1.0};
    int span = 0;
    for (int size : free_sizes) {
      std::vector<double> next(conv.size() + size, 0.0);
      for (size_t i = 0; i < conv.size(); ++i) {
        next[i] += 0.5 * conv[i];
        next[i + size] += 0.5 * conv[i];
      }
      conv.swap(next);
      span += size;
    }
    // conv[k] = P(sum of free-cluster spins = 2k - span), in units of sites.
    for (size_t k = 0; k < conv.size(); ++k) {
      if (conv[k] == 0.0) continue;
      int S = pinned_sum + 2 * int(k) - span;
      law[S + n] += w * conv[k];
    }
  }

  ExactDistribution dist;
  dist.a = params.a;
  dist.bc = bc;
  for (int i = 0; i <= 2 * n; ++i) {
    if (law[i] <= 0.0) continue;
    dist.spin_sums.push_back(i - n);
    dist.probs.push_back(law[i]);
  }
  return dist;
}

}  // namespace maglim
