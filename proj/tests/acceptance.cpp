// Acceptance suite: one pass/fail line per criterion, exit code = #failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "linfty/eigensolve.hpp"
#include "linfty/lipcalc.hpp"
#include "linfty/measures.hpp"
#include "linfty/metric.hpp"
#include "linfty/transport.hpp"
#include "oracles.hpp"

using namespace linfty;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const char* id, const char* name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] %-3s %-34s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name, detail.c_str(),
              seconds);
  if (!pass) ++failures;
}

double run_seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ScalarField mountain_ridge(const DomainPtr& dom) {
  ScalarField u(dom);
  for (int i : dom->active_nodes) {
    auto [x, y] = dom->pos(i);
    double phi = 1 - 2 * std::abs(x) + x * x;
    double psi = y < -0.5 ? 2 * (y + 1) : (y > 0.5 ? 2 * (1 - y) : 1.0);
    u[i] = phi * psi;
  }
  return u;
}

void criterion1() {
  auto t0 = Clock::now();
  auto dom = rasterize(Rectangle{-1, -1, 1, 1}, 1.0 / 64);
  auto d = distance_to_boundary(dom);
  double ray = rayleigh(d);
  double r = inradius(d);
  double secs = run_seconds(t0);
  bool pass = std::abs(ray - 1.0) <= 0.02 && std::abs(r - 1.0) <= 0.09 && secs < 5.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "rayleigh(d)=%.6f r=%.6f", ray, r);
  report("C1", "lambda_inf = 1/r on the square", pass, buf, secs);
}

void criterion2() {
  auto t0 = Clock::now();
  double h = 1.0 / 64;  // 129 nodes per axis
  MollifierSchedule sched{{8 * h, 4 * h, 2 * h}, KernelKind::Box};
  double delta = 0.05;

  struct Fig {
    std::string name;
    DomainPtr dom;
    ScalarField u;
    std::function<bool(Vec2)> caption;
    std::function<double(Vec2)> exceptional;
  };
  std::vector<Fig> figs;
  {
    auto dom = rasterize(Interval{-1, 1}, h);
    figs.push_back({"interval", dom, distance_to_boundary(dom),
                    [](Vec2 p) { return p.x != 0.0; }, [](Vec2 p) { return std::abs(p.x); }});
  }
  {
    auto dom = rasterize(Interval{-1, 1}, h);
    ScalarField u(dom);
    for (int i : dom->active_nodes) {
      double x = dom->pos(i).x;
      u[i] = 1 - 2 * std::abs(x) + x * x;
    }
    figs.push_back({"smooth-peak", dom, u, [](Vec2) { return false; },
                    [](Vec2 p) { return std::abs(p.x); }});
  }
  {
    auto dom = rasterize(Rectangle{-1, -1, 1, 1}, h);
    auto diag = [](Vec2 p) {
      return std::min(std::abs(p.x - p.y), std::abs(p.x + p.y)) / std::sqrt(2.0);
    };
    figs.push_back({"square", dom, distance_to_boundary(dom),
                    [diag](Vec2 p) { return diag(p) > 1e-12; }, diag});
  }
  {
    auto dom = rasterize(Rectangle{-1, -1, 1, 1}, h);
    figs.push_back({"mountain-ridge", dom, mountain_ridge(dom),
                    [](Vec2 p) { return p.x == 0.0 && std::abs(p.y) > 0.5 && std::abs(p.y) < 1; },
                    [](Vec2 p) { return std::min(std::abs(p.x), std::abs(std::abs(p.y) - 0.5)); }});
  }

  bool pass = true;
  std::string detail;
  size_t peak_set_size = 0;
  for (auto& fig : figs) {
    auto rep = omega_max_grad(fig.u, sched, delta);
    long agree = 0, total = 0;
    for (int i : fig.dom->interior_nodes) {
      Vec2 p = fig.dom->pos(i);
      if (fig.exceptional(p) <= 4 * h + 1e-12) continue;
      ++total;
      if (static_cast<bool>(rep.member[i]) == fig.caption(p)) ++agree;
    }
    double score = total ? static_cast<double>(agree) / total : 1.0;
    if (score < 0.99) pass = false;
    if (fig.name == "smooth-peak") peak_set_size = rep.nodes.size();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%.4f ", fig.name.c_str(), score);
    detail += buf;
  }
  bool empty_exact = peak_set_size == 0;
  if (!empty_exact) pass = false;
  detail += "empty(4.10)=" + std::to_string(peak_set_size) + " nodes";
  report("C2", "figure gallery agreement", pass, detail, run_seconds(t0));
}

void criterion3() {
  auto t0 = Clock::now();
  auto dom = rasterize(Rectangle{-1, -1, 1, 1}, 1.0 / 16);
  PSolveOptions opts{1500, 1e-4, 1e-12, 10};
  auto sw = p_sweep(dom, {2, 4, 8, 16, 32, 64}, opts);
  double lam2 = sw.entries.front().lambda;
  double lam64 = sw.entries.back().lambda;
  double secs = run_seconds(t0);
  bool pass = std::abs(lam2 - M_PI / std::sqrt(2.0)) <= 0.02 * (M_PI / std::sqrt(2.0)) &&
              std::abs(lam64 - 1.0) <= 0.05 && secs < 60.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "lambda_2=%.4f (target %.4f) lambda_64=%.4f (target 1 +- 0.05)",
                lam2, M_PI / std::sqrt(2.0), lam64);
  report("C3", "p-sweep convergence", pass, buf, secs);
}

void criterion4() {
  auto t0 = Clock::now();
  auto dom = rasterize(Disk{0, 0, 1}, 1.0 / 128);
  auto bc = ball_calibration(dom);
  auto div = weak_divergence(bc.flux);

  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> cpos(-0.3, 0.3), width(0.12, 0.2);
  double worst = 0.0;
  bool bumps_ok = true;
  for (int k = 0; k < 10; ++k) {
    double cx = cpos(rng), cy = cpos(rng), s = width(rng);
    ScalarField phi(dom);
    for (int i : dom->active_nodes) {
      auto [x, y] = dom->pos(i);
      phi[i] = std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * s * s));
    }
    double got = -pairing(div, phi);  // <-div sigma, phi> recovers phi at the center
    double err = std::abs(got - phi[bc.center_node]);
    double tol = 0.05 * std::exp(-0.5) / s;
    worst = std::max(worst, err / tol);
    if (err > tol) bumps_ok = false;
  }
  auto d = distance_to_boundary(dom);
  auto rep = eigen_system_check(d, 1.0 / inradius(d), bc.nu, bc.flux, 0.1);
  bool pass = bumps_ok && rep.passed();
  char buf[160];
  std::snprintf(buf, sizeof buf, "worst bump err/tol=%.3f eigen_system_check=%s", worst,
                rep.passed() ? "pass" : "fail");
  report("C4", "ball calibration (disk, h=1/128)", pass, buf, run_seconds(t0));
}

void criterion5() {
  auto t0 = Clock::now();
  auto dom = rasterize(Rectangle{0, 0, 1, 1}, 1.0 / 32);  // 33x33 nodes
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<size_t> pick(0, dom->interior_nodes.size() - 1);
  std::uniform_real_distribution<double> unif(0, 1);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    DiscreteMeasure mu(dom);
    for (int t = 0; t < 10; ++t) mu[dom->interior_nodes[pick(rng)]] += unif(rng);
    double gap = std::abs(j_star_flow(mu).value - j_star_closed(mu)) / mu.total_variation();
    worst = std::max(worst, gap);
  }
  bool flows_ok = worst <= 1e-6;

  double worst_tiny = 0.0;
  std::uniform_real_distribution<double> sgn(-1, 1);
  std::vector<DomainPtr> tiny = {rasterize(Interval{0, 3}, 1.0), rasterize(Interval{0, 6}, 1.0),
                                 rasterize(Rectangle{-1, -1, 1, 1}, 1.0),
                                 rasterize(Rectangle{0, 0, 3, 2}, 1.0),
                                 rasterize(Rectangle{0, 0, 4, 2}, 1.0)};
  for (auto& td : tiny)
    for (int k = 0; k < 6; ++k) {
      std::vector<double> mu(td->num_nodes(), 0.0);
      for (int i : td->interior_nodes) mu[i] = sgn(rng);
      double flow = min_cost_flow(td, mu, BoundaryMode::Free).value;
      double exact = oracle::lipschitz_polytope_max(*td, mu);
      worst_tiny = std::max(worst_tiny, std::abs(flow - exact));
    }
  bool tiny_ok = worst_tiny <= 1e-9;
  char buf[160];
  std::snprintf(buf, sizeof buf, "|flow-closed|/|mu| worst=%.2e, tiny-graph gap=%.2e", worst,
                worst_tiny);
  report("C5", "closed form vs flow duality", flows_ok && tiny_ok, buf, run_seconds(t0));
}

void criterion6() {
  auto t0 = Clock::now();
  auto dom = rasterize(Rectangle{0, 0, 1, 1}, 1.0 / 32);  // r = 1/2 <= 1
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<size_t> pick(0, dom->interior_nodes.size() - 1);
  std::uniform_real_distribution<double> unif(0, 1);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    DiscreteMeasure mu(dom);
    for (int t = 0; t < 10; ++t) mu[dom->interior_nodes[pick(rng)]] += unif(rng);
    double gap = std::abs(kr_partial_norm(mu) - j_star_flow(mu).value) / mu.total_variation();
    worst = std::max(worst, gap);
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst |KR_d - J*|/|mu| = %.2e", worst);
  report("C6", "KR boundary-quotient identity", worst <= 1e-6, buf, run_seconds(t0));
}

void criterion7() {
  auto t0 = Clock::now();
  double h = 1.0 / 64;
  auto dom = rasterize(Stadium{{-0.5, 0}, {0.5, 0}, 0.25}, h);
  auto d = distance_to_boundary(dom);
  auto ridge = high_ridge(d, h);
  auto din = inner_distance(dom, ridge, inradius(d));
  double worst = 0.0;
  for (int i : dom->active_nodes) worst = std::max(worst, std::abs(din[i] - d[i]));
  char buf[96];
  std::snprintf(buf, sizeof buf, "sup|d_in - d| = %.5f (2h = %.5f)", worst, 2 * h);
  report("C7", "stadium uniqueness", worst <= 2 * h, buf, run_seconds(t0));
}

void criterion8() {
  auto t0 = Clock::now();
  double h = 1.0 / 64;
  auto dom = rasterize(Rectangle{-1, -0.5, 1, 0.5}, h);
  auto d = distance_to_boundary(dom);
  auto ridge = high_ridge(d, h);
  double r = inradius(d);
  auto u = construct_sign_changing(dom, ridge, r);

  double lip_worst = 0.0;
  for (const auto& e : dom->edges)
    lip_worst = std::max(lip_worst, std::abs(u[e.a] - u[e.b]) / e.len);
  bool lip_ok = std::abs(lip_worst - 1.0) <= 1e-12;
  double ray = rayleigh(u);
  double mn = 0.0;
  for (int i : dom->active_nodes) mn = std::min(mn, u[i]);

  bool stadium_error = false;
  auto st = rasterize(Stadium{{-0.5, 0}, {0.5, 0}, 0.25}, h);
  auto dst = distance_to_boundary(st);
  auto rst = high_ridge(dst, h);
  try {
    construct_sign_changing(st, rst, inradius(dst));
  } catch (const Error& e) {
    stadium_error = e.code() == ErrorCode::StadiumDomain;
  }
  bool pass = lip_ok && std::abs(ray - 2.0) <= 0.04 && mn <= -0.1 && stadium_error;
  char buf[160];
  std::snprintf(buf, sizeof buf, "lip=%.12f rayleigh=%.4f min=%.4f (need <= -0.1) stadium_err=%d",
                lip_worst, ray, mn, stadium_error);
  report("C8", "sign-changing minimizer", pass, buf, run_seconds(t0));
}

void criterion9() {
  auto t0 = Clock::now();
  double h = 1.0 / 64;
  auto dom = rasterize(Rectangle{-1, -1, 1, 1}, h);
  auto d = distance_to_boundary(dom);
  auto ridge = high_ridge(d, h);
  double r = inradius(d);
  auto din = inner_distance(dom, ridge, r);

  std::vector<std::pair<std::string, ScalarField>> fields;
  fields.push_back({"d", d});
  fields.push_back({"d_in", din});
  {
    auto exact_ridge = high_ridge(d, 0.0);
    std::vector<int> fixed = dom->boundary_nodes;
    std::vector<double> vals(fixed.size(), 0.0);
    for (int i : exact_ridge.nodes) {
      fixed.push_back(i);
      vals.push_back(r);
    }
    fields.push_back({"potential", infinity_harmonic(dom, fixed, vals).u});
  }
  bool pass = true;
  std::string detail;
  for (auto& [name, u] : fields) {
    double lo = 0.0, hi = 0.0;
    for (int i : dom->active_nodes) {
      lo = std::max(lo, din[i] - std::abs(u[i]));  // d_in - 2h <= |u|
      hi = std::max(hi, std::abs(u[i]) - d[i]);    // |u| <= d + 2h
    }
    if (lo > 2 * h || hi > 2 * h) pass = false;
    char buf[80];
    std::snprintf(buf, sizeof buf, "%s:(%.4f,%.4f) ", name.c_str(), lo, hi);
    detail += buf;
  }
  char tail[48];
  std::snprintf(tail, sizeof tail, "(2h = %.5f)", 2 * h);
  detail += tail;
  report("C9", "distance envelopes", pass, detail, run_seconds(t0));
}

void criterion10() {
  auto t0 = Clock::now();
  double h = 1.0 / 64;
  auto dom = rasterize(Stadium{{-0.5, 0}, {0.5, 0}, 0.25}, h);
  auto d = distance_to_boundary(dom);
  double r = inradius(d);
  auto ridge = high_ridge(d, h);

  double worst_ridge = 0.0;
  for (int x : ridge.nodes) worst_ridge = std::max(worst_ridge, std::abs(d[x] - r));
  // spot-check a few ridge Diracs through the full flow solver
  for (size_t k = 0; k < ridge.nodes.size(); k += std::max<size_t>(1, ridge.nodes.size() / 3)) {
    DiscreteMeasure mu(dom);
    mu[ridge.nodes[k]] = 1.0;
    worst_ridge = std::max(worst_ridge, std::abs(j_star_flow(mu).value - r));
  }
  bool ridge_ok = worst_ridge <= 2 * h;

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<size_t> pick(0, dom->interior_nodes.size() - 1);
  std::vector<char> on_ridge(dom->num_nodes(), 0);
  for (int i : ridge.nodes) on_ridge[i] = 1;
  bool off_ok = true;
  int sampled = 0;
  while (sampled < 200) {
    int x = dom->interior_nodes[pick(rng)];
    if (on_ridge[x]) continue;
    ++sampled;
    if (!(d[x] < r)) off_ok = false;  // J* strictly smaller off the ridge
  }

  auto path = rasterize(Interval{0, 6}, 1.0);
  auto dp = distance_to_boundary(path);
  DiscreteMeasure dirac(path);
  dirac[path->nearest_node({3, 0})] = 1.0;
  double inf_R = rayleigh(dp);
  double r_star = dual_rayleigh(dirac);
  bool path_ok = std::abs(inf_R - 1.0 / 3) <= 1e-9 && std::abs(r_star - 1.0 / 3) <= 1e-9;

  bool pass = ridge_ok && off_ok && path_ok;
  char buf[180];
  std::snprintf(buf, sizeof buf,
                "ridge |J*-r| worst=%.5f (2h=%.5f), off-ridge strict=%d, path 1/3=%d", worst_ridge,
                2 * h, off_ok, path_ok);
  report("C10", "dual minimizers", pass, buf, run_seconds(t0));
}

void criterion11() {
  auto t0 = Clock::now();
  auto dom = rasterize(Disk{0, 0, 1}, 1.0 / 64);
  std::vector<int> fixed = dom->boundary_nodes;
  std::vector<double> vals(fixed.size(), 0.0);
  fixed.push_back(dom->nearest_node({0, 0}));
  vals.push_back(1.0);
  auto res = infinity_harmonic(dom, fixed, vals);
  double worst = 0.0;
  for (int i : dom->active_nodes)
    worst = std::max(worst, std::abs(res.u[i] - (1 - norm(dom->pos(i)))));
  bool cone_ok = worst <= 0.05;

  // comparison principle on a coarser disk, 50 random upward perturbations
  auto small = rasterize(Disk{0, 0, 1}, 1.0 / 16);
  std::vector<int> f2 = small->boundary_nodes;
  std::vector<double> v2(f2.size(), 0.0);
  f2.push_back(small->nearest_node({0, 0}));
  v2.push_back(1.0);
  auto base = infinity_harmonic(small, f2, v2);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<size_t> pick(0, f2.size() - 1);
  std::uniform_real_distribution<double> bump(0.0, 0.3);
  bool mono_ok = true;
  for (int k = 0; k < 50; ++k) {
    auto vp = v2;
    vp[pick(rng)] += bump(rng);
    auto pert = infinity_harmonic(small, f2, vp);
    for (int i : small->active_nodes)
      if (pert.u[i] < base.u[i] - 5e-7) mono_ok = false;
  }
  bool pass = cone_ok && mono_ok;
  char buf[128];
  std::snprintf(buf, sizeof buf, "sup|u-cone|=%.4f (tol 0.05), comparison principle=%d", worst,
                mono_ok);
  report("C11", "infinity-harmonic potential", pass, buf, run_seconds(t0));
}

void criterion12() {
  auto t0 = Clock::now();
  auto dom = rasterize(Rectangle{-1, -1, 1, 1}, 1.0 / 32);
  auto d = distance_to_boundary(dom);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1, 1);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto u = oracle::random_cone_field(dom, d, rng);
    EdgeFlux f(dom);
    for (auto& x : f.f) x = unif(rng);
    double margin = std::abs(flux_pairing(f, u)) - lip_constant(u) * f.total_variation();
    worst = std::max(worst, margin);
  }
  bool bound_ok = worst <= 1e-12;

  // Beckmann flux from a ridge Dirac, reversed into calibration orientation
  DiscreteMeasure dirac(dom);
  dirac[dom->nearest_node({0, 0})] = 1.0;
  auto flow = j_star_flow(dirac);
  auto flux = flow.flux;
  flux.scale(-1.0 / flux.total_variation());
  auto rep = calibration_check(d, flux, 0.1);
  bool pass = bound_ok && rep.passed();
  char buf[128];
  std::snprintf(buf, sizeof buf, "pairing-bound margin=%.1e, beckmann calibration=%s", worst,
                rep.passed() ? "pass" : "fail");
  report("C12", "calibration invariants", pass, buf, run_seconds(t0));
}

}  // namespace

int main() {
  std::printf("linfty acceptance suite\n");
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  criterion12();
  std::printf("%d of 12 criteria failed\n", failures);
  return failures;
}
