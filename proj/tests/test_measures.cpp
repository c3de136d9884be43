#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "linfty/measures.hpp"
#include "linfty/transport.hpp"
#include "oracles.hpp"

using namespace linfty;

namespace {

EdgeFlux random_flux(const DomainPtr& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1, 1);
  EdgeFlux f(dom);
  for (auto& x : f.f) x = unif(rng);
  return f;
}

}  // namespace

TEST_CASE("weak divergence: zero flux, path telescoping, summation by parts") {
  auto dom = rasterize(Rectangle{-1, -1, 1, 1}, 1.0 / 8);
  EdgeFlux zero(dom);
  auto mz = weak_divergence(zero);
  for (int i : dom->active_nodes) CHECK(mz[i] == 0.0);

  // unit flux along a straight path from an interior node to the boundary:
  // the divergence is +1 at the source and -1 where the mass exits
  int y = dom->ny / 2;
  int a = dom->id(dom->nx / 2, y);
  EdgeFlux path(dom);
  std::vector<char> on_path(dom->num_nodes(), 0);
  for (int x = dom->nx / 2; x + 1 < dom->nx; ++x) {
    int lo = dom->id(x, y), hi = dom->id(x + 1, y);
    for (size_t e = 0; e < dom->edges.size(); ++e)
      if (dom->edges[e].a == lo && dom->edges[e].b == hi) path.f[e] = 1.0;
  }
  auto mp = weak_divergence(path);
  CHECK(mp[a] == doctest::Approx(1.0));
  CHECK(mp[dom->id(dom->nx - 1, y)] == doctest::Approx(-1.0));
  CHECK(mp.total_mass() == doctest::Approx(0.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-1, 1);
  for (int k = 0; k < 40; ++k) {
    auto f = random_flux(dom, rng);
    ScalarField phi(dom);
    for (int i : dom->active_nodes) phi[i] = unif(rng);
    auto div = weak_divergence(f);
    double lhs = pairing(div, phi);
    double rhs = 0.0;
    for (size_t e = 0; e < f.f.size(); ++e)
      rhs -= (phi[dom->edges[e].b] - phi[dom->edges[e].a]) * f.f[e];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(flux_pairing(f, phi) == doctest::Approx(-lhs).epsilon(1e-12));
  }
}

TEST_CASE("duality map check") {
  double h = 1.0 / 32;
  auto dom = rasterize(Rectangle{-1, -1, 1, 1}, h);
  auto d = distance_to_boundary(dom);
  auto ridge = high_ridge(d, 0.0);

  DiscreteMeasure dirac(dom);
  dirac[ridge.nodes.front()] = 1.0;
  CHECK(duality_map_check(d, dirac, 0.05).passed());

  DiscreteMeasure uniform(dom);
  for (int i : dom->interior_nodes) uniform[i] = 1.0 / dom->interior_nodes.size();
  auto rep = duality_map_check(d, uniform, 0.05);
  CHECK(!rep.find("support_in_omega_max_abs")->passed);

  DiscreteMeasure wrong_sign(dom);
  wrong_sign[ridge.nodes.front()] = -1.0;
  auto rep2 = duality_map_check(d, wrong_sign, 0.05);
  CHECK(!rep2.find("polar_decomposition")->passed);
  CHECK(rep2.find("unit_mass")->passed);
}

TEST_CASE("calibration check on the interval") {
  double h = 1.0 / 64;
  auto dom = rasterize(Interval{-1, 1}, h);
  auto d = distance_to_boundary(dom);

  // calibration points up-gradient: +1 left of the peak, -1 right of it,
  // scaled to unit mass
  EdgeFlux flux(dom);
  for (size_t e = 0; e < dom->edges.size(); ++e) {
    double mid = 0.5 * (dom->pos(dom->edges[e].a).x + dom->pos(dom->edges[e].b).x);
    flux.f[e] = mid < 0 ? 1.0 : -1.0;
  }
  flux.scale(1.0 / flux.total_variation());
  auto rep = calibration_check(d, flux, 0.05);
  CHECK(rep.passed());
  auto div = weak_divergence(flux);
  CHECK(-div[dom->nearest_node({0, 0})] > 0.0);  // -div sigma = delta at the peak

  // reversed flux pairs to -J and fails
  EdgeFlux rev = flux;
  rev.scale(-1.0);
  CHECK(!calibration_check(d, rev, 0.05).find("pairing_identity")->passed);

  // support violation: for a field whose Omega_max is a small cluster near
  // the origin, flux mass on a far edge is flagged with its mass
  ScalarField peak(dom);
  for (int i : dom->active_nodes) {
    double x = dom->pos(i).x;
    peak[i] = 1 - 2 * std::abs(x) + x * x;
  }
  EdgeFlux far_flux(dom);
  int far = -1, near = -1;
  for (size_t e = 0; e < dom->edges.size(); ++e) {
    double mid = 0.5 * (dom->pos(dom->edges[e].a).x + dom->pos(dom->edges[e].b).x);
    if (std::abs(mid - 0.5) < h) far = static_cast<int>(e);
    if (std::abs(mid - 2.5 * h) < h / 2) near = static_cast<int>(e);
  }
  REQUIRE(far >= 0);
  REQUIRE(near >= 0);
  far_flux.f[near] = -0.9 / dom->edges[near].len;  // toward the peak, on the cluster
  far_flux.f[far] = -0.1 / dom->edges[far].len;
  auto repb = calibration_check(peak, far_flux, 0.05);
  CHECK(!repb.find("support_in_omega_max_grad")->passed);
  CHECK(repb.find("support_in_omega_max_grad")->worst == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("pairing bound |<-div sigma, u>| <= J(u) |sigma|(Omega)") {
  auto dom = rasterize(Rectangle{-1, -0.5, 1, 0.5}, 1.0 / 16);
  auto d = distance_to_boundary(dom);
  std::mt19937_64 rng(9);
  for (int k = 0; k < 100; ++k) {
    auto u = oracle::random_cone_field(dom, d, rng);
    auto f = random_flux(dom, rng);
    double lhs = std::abs(flux_pairing(f, u));
    CHECK(lhs <= lip_constant(u) * f.total_variation() * (1 + 1e-12) + 1e-15);
  }
}

TEST_CASE("ball calibration on the disk") {
  auto dom = rasterize(Disk{0, 0, 1}, 1.0 / 64);
  auto bc = ball_calibration(dom);
  CHECK(bc.nu[bc.center_node] == 1.0);
  CHECK(bc.flux.total_variation() == doctest::Approx(1.0).epsilon(0.075));

  // <-div sigma, phi> recovers phi(center) for interior gaussian bumps
  auto div = weak_divergence(bc.flux);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> cpos(-0.3, 0.3), width(0.12, 0.2);
  for (int k = 0; k < 10; ++k) {
    double cx = cpos(rng), cy = cpos(rng), s = width(rng);
    ScalarField phi(dom);
    for (int i : dom->active_nodes) {
      auto [x, y] = dom->pos(i);
      phi[i] = std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * s * s));
    }
    double got = -pairing(div, phi);
    double grad_sup = std::exp(-0.5) / s;
    CHECK(std::abs(got - phi[bc.center_node]) <= 0.05 * grad_sup);
  }

  auto d = distance_to_boundary(dom);
  CHECK(eigen_system_check(d, 1.0 / inradius(d), bc.nu, bc.flux, 0.1).passed());
  CHECK(calibration_check(d, bc.flux, 0.1).passed());
  CHECK(min_equation_check(d, 1.0 / inradius(d), bc.nu, bc.flux, 0.1).passed());

  auto sq = rasterize(Rectangle{-1, -1, 1, 1}, 0.25);
  CHECK_THROWS_AS(ball_calibration(sq), Error);
}

TEST_CASE("eigen system check failure modes") {
  auto dom = rasterize(Disk{0, 0, 1}, 1.0 / 64);
  auto bc = ball_calibration(dom);
  auto d = distance_to_boundary(dom);
  double lam = 1.0 / inradius(d);

  auto doubled = eigen_system_check(d, 2 * lam, bc.nu, bc.flux, 0.1);
  CHECK(!doubled.find("pde_residual")->passed);
  CHECK(doubled.find("pde_residual")->worst > 0.4);

  DiscreteMeasure off(dom);
  off[dom->nearest_node({0.5, 0})] = 1.0;
  auto moved = eigen_system_check(d, lam, off, bc.flux, 0.1);
  CHECK(!moved.find("nu_support")->passed);

  DiscreteMeasure neg(dom);
  neg[bc.center_node] = -1.0;
  CHECK_THROWS_AS(eigen_system_check(d, lam, neg, bc.flux, 0.1), Error);
}

TEST_CASE("min equation check failure modes") {
  auto dom = rasterize(Disk{0, 0, 1}, 1.0 / 64);
  auto bc = ball_calibration(dom);
  auto d = distance_to_boundary(dom);
  double lam = 1.0 / inradius(d);

  // spurious divergence at a node where the slope slack is positive
  auto bad = bc.flux;
  int mid = dom->nearest_node({0.45, 0.2});
  for (auto [j, e] : dom->neighbors(mid)) {
    (void)j;
    bad.f[e] += 0.5;
    break;
  }
  CHECK(!min_equation_check(d, lam, bc.nu, bad, 0.1).passed());

  ScalarField flipped(dom);
  for (int i : dom->active_nodes) flipped[i] = -d[i];
  auto rep = min_equation_check(flipped, lam, bc.nu, bc.flux, 0.1);
  CHECK(!rep.find("u_nonneg")->passed);
}

TEST_CASE("parallelity of gradients on the square") {
  double h = 1.0 / 32;
  auto dom = rasterize(Rectangle{-1, -1, 1, 1}, h);
  auto d = distance_to_boundary(dom);
  auto ridge = high_ridge(d, h);
  auto din = inner_distance(dom, ridge, inradius(d));

  // radial transport flux of d_in: ship the ridge Dirac to the boundary
  DiscreteMeasure dirac(dom);
  dirac[dom->nearest_node({0, 0})] = 1.0;
  auto flow = j_star_flow(dirac);

  auto rep = parallelity_check(din, d, flow.flux, 0.05);
  CHECK(rep.passed());

  ScalarField negd(dom);
  for (int i : dom->active_nodes) negd[i] = -d[i];
  CHECK(!parallelity_check(din, negd, flow.flux, 0.05).find("sign_agreement")->passed);
}

TEST_CASE("measure and flux csv round trips") {
  auto dom = rasterize(Rectangle{-1, -0.5, 1, 0.5}, 1.0 / 8);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unif(-2, 2);
  DiscreteMeasure mu(dom);
  for (int k = 0; k < 25; ++k) mu[dom->active_nodes[k * 7 % dom->active_nodes.size()]] = unif(rng);
  auto mpath = std::filesystem::temp_directory_path() / "linfty_mu.csv";
  save_measure_csv(mu, mpath.string());
  auto mu2 = load_measure_csv(dom, mpath.string());
  for (int i : dom->active_nodes) CHECK(mu[i] == mu2[i]);
  std::filesystem::remove(mpath);

  auto f = random_flux(dom, rng);
  auto fpath = std::filesystem::temp_directory_path() / "linfty_flux.csv";
  save_flux_csv(f, fpath.string());
  auto f2 = load_flux_csv(dom, fpath.string());
  for (size_t e = 0; e < f.f.size(); ++e) CHECK(f.f[e] == f2.f[e]);
  std::filesystem::remove(fpath);
}
