#include "linfty/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace linfty {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassEps = 1e-13;

// residual arc enumeration happens over this transient structure: real stencil
// edges plus optional reservoir arcs to a virtual node
struct SolverGraph {
  int n = 0;       // total nodes incl. virtual
  int world = -1;  // virtual node id or -1
  struct Arc {
    int to;
    int edge;  // >= 0: real edge id, < 0: -(virtual edge id)-1
    double cost;
  };
  std::vector<int> start;
  std::vector<Arc> arcs;
  const GridDomain* dom = nullptr;
  std::vector<std::pair<int, double>> virtual_edges;  // (node, cost), flow node->world positive
};

SolverGraph build_graph(const GridDomain& dom, BoundaryMode mode) {
  SolverGraph g;
  g.dom = &dom;
  bool world = mode != BoundaryMode::None;
  g.n = dom.num_nodes() + (world ? 1 : 0);
  g.world = world ? dom.num_nodes() : -1;

  if (mode == BoundaryMode::Free) {
    for (int b : dom.boundary_nodes) g.virtual_edges.push_back({b, 0.0});
  } else if (mode == BoundaryMode::Priced) {
    for (int i : dom.active_nodes) g.virtual_edges.push_back({i, 1.0});
  } else if (mode == BoundaryMode::FreeAndPriced) {
    for (int i : dom.active_nodes)
      g.virtual_edges.push_back({i, dom.boundary(i) ? 0.0 : 1.0});
  }

  std::vector<int> deg(g.n + 1, 0);
  for (const auto& e : dom.edges) {
    ++deg[e.a + 1];
    ++deg[e.b + 1];
  }
  for (const auto& [i, c] : g.virtual_edges) {
    (void)c;
    ++deg[i + 1];
    ++deg[g.world + 1];
  }
  g.start.assign(g.n + 1, 0);
  for (int i = 0; i < g.n; ++i) g.start[i + 1] = g.start[i] + deg[i + 1];
  g.arcs.resize(g.start[g.n]);
  std::vector<int> cur(g.start.begin(), g.start.end() - 1);
  for (int e = 0; e < static_cast<int>(dom.edges.size()); ++e) {
    const auto& ed = dom.edges[e];
    g.arcs[cur[ed.a]++] = {ed.b, e, ed.len};
    g.arcs[cur[ed.b]++] = {ed.a, e, ed.len};
  }
  for (int v = 0; v < static_cast<int>(g.virtual_edges.size()); ++v) {
    auto [i, c] = g.virtual_edges[v];
    g.arcs[cur[i]++] = {g.world, -v - 1, c};
    g.arcs[cur[g.world]++] = {i, -v - 1, c};
  }
  return g;
}

}  // namespace

FlowResult min_cost_flow(const DomainPtr& dom, const std::vector<double>& supply,
                         BoundaryMode mode) {
  if (static_cast<int>(supply.size()) != dom->num_nodes())
    throw Error(ErrorCode::InvalidArgument, "supply size mismatch");
  for (int i = 0; i < dom->num_nodes(); ++i)
    if (supply[i] != 0.0 && !dom->active(i))
      throw Error(ErrorCode::InvalidArgument, "supply on exterior node");

  SolverGraph g = build_graph(*dom, mode);
  std::vector<double> excess(g.n, 0.0);
  double total = 0.0;
  for (int i = 0; i < dom->num_nodes(); ++i) {
    excess[i] = supply[i];
    total += supply[i];
  }
  if (g.world >= 0)
    excess[g.world] = -total;
  else if (std::abs(total) > 1e-12)
    throw Error(ErrorCode::UnbalancedMass, "supplies must balance without a reservoir");

  FlowResult res;
  res.flux = EdgeFlux(dom);
  std::vector<double> vflow(g.virtual_edges.size(), 0.0);
  std::vector<double> pi(g.n, 0.0), dist(g.n);
  std::vector<int> parent_arc(g.n);

  auto marginal = [&](const SolverGraph::Arc& a, int from) -> double {
    // cost of pushing one unit from `from` along this arc
    double f = a.edge >= 0 ? res.flux.f[a.edge] : vflow[-a.edge - 1];
    int low = a.edge >= 0 ? dom->edges[a.edge].a : g.virtual_edges[-a.edge - 1].first;
    bool forward = (from == low);  // orientation: low->high / node->world positive
    double directed = forward ? f : -f;
    return directed < -kMassEps ? -a.cost : a.cost;
  };

  while (true) {
    bool have_src = false, have_snk = false;
    for (int i = 0; i < g.n; ++i) {
      if (excess[i] > kMassEps) have_src = true;
      if (excess[i] < -kMassEps) have_snk = true;
    }
    if (!have_src && !have_snk) break;
    if (have_src != have_snk) throw Error(ErrorCode::SolverFailure, "unbalanced residual excess");

    // multi-source Dijkstra with reduced costs
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent_arc.begin(), parent_arc.end(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (int i = 0; i < g.n; ++i)
      if (excess[i] > kMassEps) {
        dist[i] = 0.0;
        pq.push({0.0, i});
      }
    while (!pq.empty()) {
      auto [d, i] = pq.top();
      pq.pop();
      if (d > dist[i]) continue;
      for (int k = g.start[i]; k < g.start[i + 1]; ++k) {
        const auto& a = g.arcs[k];
        double rc = marginal(a, i) + pi[i] - pi[a.to];
        if (rc < 0.0) {
          if (rc < -1e-7) throw Error(ErrorCode::SolverFailure, "negative reduced cost");
          rc = 0.0;
        }
        double nd = d + rc;
        if (nd < dist[a.to]) {
          dist[a.to] = nd;
          parent_arc[a.to] = k;
          pq.push({nd, a.to});
        }
      }
    }

    int sink = -1;
    for (int i = 0; i < g.n; ++i)
      if (excess[i] < -kMassEps && dist[i] < kInf && (sink < 0 || dist[i] < dist[sink]))
        sink = i;
    if (sink < 0) throw Error(ErrorCode::SolverFailure, "no augmenting path");

    // amount limited by the endpoints and by any flow being canceled on the
    // path (pushing past the cancellation point would flip the sign at the
    // cheap marginal cost and invalidate the potentials)
    double amount = -excess[sink];
    int node = sink;
    while (parent_arc[node] >= 0) {
      const auto& a = g.arcs[parent_arc[node]];
      int from = a.edge >= 0
                     ? dom->opposite(a.edge, node)
                     : (node == g.world ? g.virtual_edges[-a.edge - 1].first : g.world);
      double f = a.edge >= 0 ? res.flux.f[a.edge] : vflow[-a.edge - 1];
      int low = a.edge >= 0 ? dom->edges[a.edge].a : g.virtual_edges[-a.edge - 1].first;
      double directed = (from == low) ? f : -f;
      if (directed < -kMassEps) amount = std::min(amount, -directed);
      node = from;
    }
    amount = std::min(amount, excess[node]);

    int src = node;
    node = sink;
    while (node != src) {
      const auto& a = g.arcs[parent_arc[node]];
      int from;
      if (a.edge >= 0) {
        from = dom->opposite(a.edge, node);
        const auto& ed = dom->edges[a.edge];
        res.flux.f[a.edge] += (from == ed.a) ? amount : -amount;
      } else {
        int v = -a.edge - 1;
        from = (node == g.world) ? g.virtual_edges[v].first : g.world;
        vflow[v] += (from != g.world) ? amount : -amount;
      }
      node = from;
    }
    excess[src] -= amount;
    excess[sink] += amount;

    double dcap = dist[sink];
    for (int i = 0; i < g.n; ++i) pi[i] += std::min(dist[i], dcap);
    ++res.augmentations;
    if (res.augmentations > 50 * g.n + 10 * static_cast<int>(g.arcs.size()))
      throw Error(ErrorCode::SolverFailure, "augmentation budget exceeded");
  }

  res.value = res.flux.total_variation();
  for (size_t v = 0; v < vflow.size(); ++v) {
    res.value += std::abs(vflow[v]) * g.virtual_edges[v].second;
    if (g.virtual_edges[v].second > 0.0) res.created_mass += std::abs(vflow[v]);
  }

  // Lipschitz potential certificate: zero at the reservoir (or at max pi)
  res.potential.assign(dom->num_nodes(), 0.0);
  double ref = g.world >= 0 ? pi[g.world] : *std::max_element(pi.begin(), pi.end());
  for (int i : dom->active_nodes) res.potential[i] = ref - pi[i];
  return res;
}

double j_star_closed(const DiscreteMeasure& mu) {
  for (int i : mu.dom->active_nodes)
    if (mu[i] < 0.0)
      throw Error(ErrorCode::SignedMeasure, "closed form needs mu >= 0; use j_star_flow");
  auto d = distance_to_boundary(mu.dom);
  double s = 0.0;
  for (int i : mu.dom->active_nodes) s += mu[i] * d[i];
  return s;
}

FlowResult j_star_flow(const DiscreteMeasure& mu) {
  return min_cost_flow(mu.dom, mu.w, BoundaryMode::Free);
}

double w1(const DiscreteMeasure& mu, const DiscreteMeasure& rho) {
  if (!mu.is_probability(1e-9) || !rho.is_probability(1e-9))
    throw Error(ErrorCode::InvalidArgument, "w1 expects probability measures");
  if (std::abs(mu.total_mass() - rho.total_mass()) > 1e-12)
    throw Error(ErrorCode::UnbalancedMass, "w1 masses differ");
  std::vector<double> supply(mu.dom->num_nodes(), 0.0);
  for (int i : mu.dom->active_nodes) supply[i] = mu[i] - rho[i];
  return min_cost_flow(mu.dom, supply, BoundaryMode::None).value;
}

double kr_norm(const DiscreteMeasure& mu) {
  return min_cost_flow(mu.dom, mu.w, BoundaryMode::Priced).value;
}

double kr_partial_norm(const DiscreteMeasure& mu) {
  return min_cost_flow(mu.dom, mu.w, BoundaryMode::FreeAndPriced).value;
}

double dual_rayleigh(const DiscreteMeasure& mu) {
  double tv = mu.total_variation();
  if (tv == 0.0) throw Error(ErrorCode::InvalidArgument, "dual_rayleigh of zero measure");
  double jstar = j_star_flow(mu).value;
  if (jstar <= 1e-14 * tv)
    throw Error(ErrorCode::ZeroDual, "J*(mu) = 0; mu annihilates zero-trace Lipschitz fields");
  return tv / jstar;
}

CheckReport dual_minimizer_check(const DomainPtr& dom, int samples, double tol,
                                 std::uint64_t seed) {
  CheckReport rep;
  auto d = distance_to_boundary(dom);
  double r = inradius(d);
  double lam = 1.0 / r;
  auto ridge = high_ridge(d, dom->h);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, dom->interior_nodes.size() - 1);

  double worst_lb = 0.0;  // how far any Dirac falls below lambda
  for (int k = 0; k < samples; ++k) {
    int x = dom->interior_nodes[pick(rng)];
    double quot = 1.0 / d[x];  // dual Rayleigh of a Dirac, closed form
    worst_lb = std::max(worst_lb, (lam - quot) / lam);
  }
  rep.items.push_back({"dirac_lower_bound", worst_lb <= tol, worst_lb,
                       "max relative drop below lambda over sampled Diracs"});

  // ridge Diracs attain J* = r up to the ridge plateau width (absolute 2h)
  double worst_ridge = 0.0;
  for (int x : ridge.nodes) worst_ridge = std::max(worst_ridge, std::abs(d[x] - r));
  rep.items.push_back({"ridge_attains", worst_ridge <= 2 * dom->h, worst_ridge,
                       "max |J*(ridge dirac) - r|"});

  // the duality-map measure (ridge Dirac) maximizes J* over sampled
  // probability measures
  double jstar_mu = d[ridge.nodes.front()];
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double best_other = 0.0;
  for (int k = 0; k < samples; ++k) {
    DiscreteMeasure m(dom);
    double tot = 0.0;
    for (int t = 0; t < 8; ++t) {
      int x = dom->interior_nodes[pick(rng)];
      double w = unif(rng);
      m[x] += w;
      tot += w;
    }
    for (int i : dom->active_nodes) m[i] /= tot;
    best_other = std::max(best_other, j_star_closed(m));
  }
  rep.items.push_back({"duality_map_maximizes", best_other <= jstar_mu + tol * r,
                       std::max(0.0, best_other - jstar_mu),
                       "best sampled J* vs ridge Dirac J*"});
  return rep;
}

CheckReport graph_duality_check(const DomainPtr& dom, int samples, double tol,
                                std::uint64_t seed) {
  CheckReport rep;
  auto d = distance_to_boundary(dom);
  double r = inradius(d);
  double inf_R = rayleigh(d);  // attained by the distance function
  auto ridge = high_ridge(d, 0.0);

  DiscreteMeasure dirac(dom);
  dirac[ridge.nodes.front()] = 1.0;
  double r_star = dual_rayleigh(dirac);
  rep.items.push_back({"primal_dual_equality", std::abs(inf_R - r_star) <= tol,
                       std::abs(inf_R - r_star),
                       "inf R = " + std::to_string(inf_R) + ", R* = " + std::to_string(r_star)});

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, dom->active_nodes.size() - 1);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    DiscreteMeasure m(dom);
    for (int t = 0; t < 6; ++t) m[dom->active_nodes[pick(rng)]] += unif(rng);
    double tv = m.total_variation();
    if (tv == 0.0) continue;
    double val = j_star_flow(m).value;
    worst = std::max(worst, (val - r * tv) / tv);
  }
  rep.items.push_back({"dual_coercivity", worst <= tol, worst,
                       "max (J*(mu) - r|mu|)/|mu| over random signed mu"});
  return rep;
}

}  // namespace linfty
