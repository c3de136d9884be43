#include "linfty/lipcalc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <thread>

namespace linfty {

ScalarField local_slope(const ScalarField& u) {
  const auto& dom = *u.dom;
  ScalarField s(u.dom);
  for (const auto& e : dom.edges) {
    double slope = std::abs(u[e.a] - u[e.b]) / e.len;
    s[e.a] = std::max(s[e.a], slope);
    s[e.b] = std::max(s[e.b], slope);
  }
  return s;
}

double lip_constant(const ScalarField& u) {
  double m = 0.0;
  for (const auto& e : u.dom->edges) m = std::max(m, std::abs(u[e.a] - u[e.b]) / e.len);
  return m;
}

double rayleigh(const ScalarField& u) {
  double sup = u.max_abs();
  if (sup == 0.0) throw Error(ErrorCode::ZeroFunction, "rayleigh of the zero function");
  return lip_constant(u) / sup;
}

std::vector<int> omega_max_abs(const ScalarField& u, double tol) {
  double sup = u.max_abs();
  if (sup == 0.0) throw Error(ErrorCode::ZeroFunction, "omega_max_abs of the zero function");
  std::vector<int> out;
  for (int i : u.dom->active_nodes)
    if (std::abs(u[i]) >= sup - tol) out.push_back(i);
  return out;
}

MollifierSchedule MollifierSchedule::default_for(double h) {
  return {{8 * h, 4 * h, 2 * h}, KernelKind::Box};
}

void MollifierSchedule::validate(double h) const {
  if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "empty mollifier schedule");
  for (size_t k = 0; k < radii.size(); ++k) {
    if (radii[k] < h - 1e-12)
      throw Error(ErrorCode::InvalidArgument, "mollifier radius below grid spacing");
    if (k > 0 && !(radii[k] < radii[k - 1]))
      throw Error(ErrorCode::InvalidArgument, "mollifier radii must decrease strictly");
  }
}

namespace {

int env_threads() {
  if (const char* s = std::getenv("LINFTY_THREADS")) {
    int n = std::atoi(s);
    if (n >= 1) return n;
  }
  return 1;
}

// truncated Dijkstra ball around one node
void collect_ball(const GridDomain& dom, int center, double radius, std::vector<double>& dist,
                  std::vector<int>& touched) {
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[center] = 0.0;
  touched.push_back(center);
  pq.push({0.0, center});
  while (!pq.empty()) {
    auto [d, i] = pq.top();
    pq.pop();
    if (d > dist[i]) continue;
    for (auto [j, e] : dom.neighbors(i)) {
      double nd = d + dom.edge_len(e);
      if (nd <= radius + 1e-12 && nd < dist[j]) {
        if (dist[j] == std::numeric_limits<double>::infinity()) touched.push_back(j);
        dist[j] = nd;
        pq.push({nd, j});
      }
    }
  }
}

}  // namespace

ScalarField mollify(const ScalarField& u, double radius, KernelKind kernel) {
  const auto& dom = *u.dom;
  if (radius < dom.h - 1e-12)
    throw Error(ErrorCode::InvalidArgument, "mollify radius below grid spacing");
  ScalarField out(u.dom);

  int nthreads = std::min<int>(env_threads(), std::max<size_t>(dom.active_nodes.size() / 256, 1));
  auto work = [&](int t) {
    std::vector<double> dist(dom.num_nodes(), std::numeric_limits<double>::infinity());
    std::vector<int> touched;
    for (size_t k = t; k < dom.active_nodes.size(); k += nthreads) {
      int i = dom.active_nodes[k];
      touched.clear();
      collect_ball(dom, i, radius, dist, touched);
      // Samples are paired with their point reflection through the center, so
      // the average is exact on linear profiles even where the ball is
      // clipped by the domain boundary (and zero traces stay zero). Pairs
      // whose mirror leaves the active grid are dropped.
      int cx = dom.ix_of(i), cy = dom.iy_of(i);
      double num = 0.0, den = 0.0;
      for (int j : touched) {
        double w = kernel == KernelKind::Box ? 1.0 : std::max(0.0, 1.0 - dist[j] / radius);
        dist[j] = std::numeric_limits<double>::infinity();
        if (w <= 0.0) continue;
        int mx = 2 * cx - dom.ix_of(j), my = 2 * cy - dom.iy_of(j);
        if (mx < 0 || mx >= dom.nx || my < 0 || my >= dom.ny) continue;
        int m = dom.id(mx, my);
        if (!dom.active(m)) continue;
        num += w * 0.5 * (u[j] + u[m]);
        den += w;
      }
      out[i] = num / den;
    }
  };
  if (nthreads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  // enforce the slope bound exactly
  double lip_u = lip_constant(u);
  double lip_m = lip_constant(out);
  if (lip_m > lip_u && lip_m > 0.0) {
    double c = lip_u / lip_m;
    for (int i : dom.active_nodes) out[i] *= c;
  }
  return out;
}

OmegaMaxReport omega_max_grad(const ScalarField& u, const MollifierSchedule& schedule,
                              double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw Error(ErrorCode::InvalidArgument, "delta must be in (0,1)");
  schedule.validate(u.dom->h);

  OmegaMaxReport rep;
  rep.lip = lip_constant(u);
  rep.threshold = (1.0 - delta) * rep.lip;
  for (double r : schedule.radii) rep.slopes.push_back(local_slope(mollify(u, r, schedule.kernel)));

  // membership over interior nodes only: the set lives in the open domain
  const ScalarField& last = rep.slopes.back();
  rep.member.assign(u.dom->num_nodes(), 0);
  for (int i : u.dom->interior_nodes) {
    if (last[i] >= rep.threshold) {
      rep.member[i] = 1;
      rep.nodes.push_back(i);
    }
  }
  return rep;
}

}  // namespace linfty
