#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "linfty/lipcalc.hpp"
#include "linfty/metric.hpp"
#include "oracles.hpp"

using namespace linfty;

namespace {
constexpr double kChamfer = 0.08239220029239402;  // sec(pi/8) - 1
}

TEST_CASE("interval distance is exactly 1 - |x|") {
  auto dom = rasterize(Interval{-1, 1}, 1.0 / 64);
  auto d = distance_to_boundary(dom);
  for (int i : dom->active_nodes) {
    double x = dom->pos(i).x;
    CHECK(d[i] == doctest::Approx(1 - std::abs(x)).epsilon(1e-12));
  }
  CHECK(inradius(d) == doctest::Approx(1.0));
}

TEST_CASE("square and disk transforms obey the chamfer bound") {
  double h = 1.0 / 64;
  for (ShapeSpec shape : {ShapeSpec(Rectangle{-1, -1, 1, 1}), ShapeSpec(Disk{0, 0, 1})}) {
    auto dom = rasterize(shape, h);
    auto d = distance_to_boundary(dom);
    for (int i : dom->interior_nodes) {
      double exact = exact_boundary_distance(shape, dom->pos(i));
      CHECK(d[i] >= exact - 1.6 * h);  // boundary nodes sit within a cell of the curve
      CHECK(d[i] <= (1 + kChamfer) * exact + 1.6 * h);
    }
  }
}

TEST_CASE("disk center value within the chamfer budget of 1") {
  auto dom = rasterize(Disk{0, 0, 1}, 1.0 / 64);
  auto d = distance_to_boundary(dom);
  double r = inradius(d);
  CHECK(r > 1.0 - 2.0 / 64);
  CHECK(r < 1.0 + kChamfer);
}

TEST_CASE("high ridge of square, disk, stadium") {
  double h = 1.0 / 64;
  auto sq = rasterize(Rectangle{-1, -1, 1, 1}, h);
  auto dsq = distance_to_boundary(sq);
  auto ridge = high_ridge(dsq, h);
  for (int i : ridge.nodes) {
    Vec2 p = sq->pos(i);
    CHECK(std::abs(p.x) <= 2 * h);
    CHECK(std::abs(p.y) <= 2 * h);
  }

  auto dk = rasterize(Disk{0, 0, 1}, h);
  auto ddk = distance_to_boundary(dk);
  auto rdk = high_ridge(ddk, h);
  for (int i : rdk.nodes) CHECK(norm(dk->pos(i)) <= 3 * h);

  auto st = rasterize(Stadium{{-0.5, 0}, {0.5, 0}, 0.25}, h);
  auto dst = distance_to_boundary(st);
  auto rst = high_ridge(dst, h);
  CHECK(rst.nodes.size() > 10);
  for (int i : rst.nodes) {
    Vec2 p = st->pos(i);
    CHECK(std::abs(p.y) <= 2 * h);  // hugs the segment
    CHECK(std::abs(p.x) <= 0.5 + 2 * h);
  }
}

TEST_CASE("distance_to_set basics") {
  auto dom = rasterize(Rectangle{-1, -1, 1, 1}, 1.0 / 16);
  CHECK_THROWS_AS(distance_to_set(dom, {}), Error);

  // seeds = all boundary nodes reproduces distance_to_boundary
  auto a = distance_to_set(dom, dom->boundary_nodes);
  auto b = distance_to_boundary(dom);
  for (int i : dom->active_nodes) CHECK(a[i] == b[i]);

  // two seeds: pointwise min of the single-seed transforms
  int s1 = dom->id(3, 4), s2 = dom->id(12, 9);
  auto d1 = distance_to_set(dom, {s1});
  auto d2 = distance_to_set(dom, {s2});
  auto dd = distance_to_set(dom, {s1, s2});
  for (int i : dom->active_nodes) CHECK(dd[i] == doctest::Approx(std::min(d1[i], d2[i])));

  // single seed at the disk center approximates |x|
  auto dk = rasterize(Disk{0, 0, 1}, 1.0 / 64);
  auto dc = distance_to_set(dk, {dk->nearest_node({0, 0})});
  for (int i : dk->active_nodes) {
    double r = norm(dk->pos(i));
    CHECK(dc[i] >= r - 1e-9);
    CHECK(dc[i] <= (1 + kChamfer) * r + 1e-9);
  }
}

TEST_CASE("generalized inball") {
  double h = 1.0 / 64;
  auto sq = rasterize(Rectangle{-1, -1, 1, 1}, h);
  auto d = distance_to_boundary(sq);
  auto ridge = high_ridge(d, h);
  double r = inradius(d);

  // r below h keeps exactly the ridge nodes
  auto tiny = generalized_inball(sq, ridge, h / 2);
  CHECK(tiny == ridge.nodes);

  auto ball = generalized_inball(sq, ridge, r);
  auto drge = distance_to_set(sq, ridge.nodes);
  for (int i : ball) CHECK(drge[i] < r);

  // stadium: covers every interior node up to the chamfer crescents
  auto st = rasterize(Stadium{{-0.5, 0}, {0.5, 0}, 0.25}, h);
  auto dstf = distance_to_boundary(st);
  auto rst = high_ridge(dstf, h);
  auto stball = generalized_inball(st, rst, inradius(dstf));
  std::vector<char> in(st->num_nodes(), 0);
  for (int i : stball) in[i] = 1;
  int missed = 0;
  for (int i : st->interior_nodes)
    if (!in[i]) ++missed;
  CHECK(missed < static_cast<int>(st->interior_nodes.size()) / 20);
}

TEST_CASE("inner distance: cone on the square, equals d on the stadium") {
  double h = 1.0 / 64;
  auto sq = rasterize(Rectangle{-1, -1, 1, 1}, h);
  auto d = distance_to_boundary(sq);
  auto ridge = high_ridge(d, h);
  double r = inradius(d);
  auto din = inner_distance(sq, ridge, r);
  auto drge = distance_to_set(sq, ridge.nodes);
  for (int i : sq->active_nodes) {
    CHECK(din[i] == doctest::Approx(std::max(r - drge[i], 0.0)));
    CHECK(din[i] <= d[i] + ridge.tol + 1e-9);  // ball inclusion
    if (drge[i] < 1e-12) CHECK(din[i] == doctest::Approx(r));
  }

  auto st = rasterize(Stadium{{-0.5, 0}, {0.5, 0}, 0.25}, h);
  auto dstf = distance_to_boundary(st);
  auto rst = high_ridge(dstf, h);
  auto dinst = inner_distance(st, rst, inradius(dstf));
  double worst = 0.0;
  for (int i : st->active_nodes) worst = std::max(worst, std::abs(dinst[i] - dstf[i]));
  CHECK(worst <= 2 * h);
}

TEST_CASE("maximality: random 1-Lipschitz zero-trace fields stay below d") {
  auto dom = rasterize(Rectangle{-1, -0.5, 1, 0.5}, 1.0 / 16);
  auto d = distance_to_boundary(dom);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    auto u = oracle::random_cone_field(dom, d, rng);
    CHECK(lip_constant(u) <= 1.0 + 1e-12);
    for (int i : dom->active_nodes) CHECK(u[i] <= d[i] + 1e-12);
  }
}

TEST_CASE("distance transform attains unit graph slope") {
  auto dom = rasterize(Disk{0, 0, 1}, 1.0 / 32);
  auto d = distance_to_boundary(dom);
  CHECK(lip_constant(d) == doctest::Approx(1.0).epsilon(1e-12));
}
