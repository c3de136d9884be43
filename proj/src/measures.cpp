#include "linfty/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace linfty {

double DiscreteMeasure::total_variation() const {
  double s = 0.0;
  for (int i : dom->active_nodes) s += std::abs(w[i]);
  return s;
}

double DiscreteMeasure::total_mass() const {
  double s = 0.0;
  for (int i : dom->active_nodes) s += w[i];
  return s;
}

std::vector<int> DiscreteMeasure::support(double eps) const {
  std::vector<int> out;
  for (int i : dom->active_nodes)
    if (std::abs(w[i]) > eps) out.push_back(i);
  return out;
}

bool DiscreteMeasure::is_probability(double tol) const {
  for (int i : dom->active_nodes)
    if (w[i] < -tol) return false;
  return std::abs(total_mass() - 1.0) <= tol;
}

double EdgeFlux::total_variation() const {
  double s = 0.0;
  for (size_t e = 0; e < f.size(); ++e) s += std::abs(f[e]) * dom->edges[e].len;
  return s;
}

void EdgeFlux::scale(double c) {
  for (auto& x : f) x *= c;
}

DiscreteMeasure weak_divergence(const EdgeFlux& flux) {
  DiscreteMeasure mu(flux.dom);
  const auto& edges = flux.dom->edges;
  for (size_t e = 0; e < edges.size(); ++e) {
    mu[edges[e].a] += flux.f[e];
    mu[edges[e].b] -= flux.f[e];
  }
  return mu;
}

double pairing(const DiscreteMeasure& mu, const ScalarField& u) {
  double s = 0.0;
  for (int i : mu.dom->active_nodes) s += mu[i] * u[i];
  return s;
}

double flux_pairing(const EdgeFlux& flux, const ScalarField& u) {
  double s = 0.0;
  const auto& edges = flux.dom->edges;
  for (size_t e = 0; e < edges.size(); ++e) s += flux.f[e] * (u[edges[e].b] - u[edges[e].a]);
  return s;
}

namespace {

// nodes within `radius` (graph metric) of a seed set, as a membership mask
std::vector<char> dilate_set(const DomainPtr& dom, const std::vector<int>& seeds, double radius) {
  std::vector<char> mask(dom->num_nodes(), 0);
  if (seeds.empty()) return mask;
  auto d = distance_to_set(dom, seeds);
  for (int i : dom->active_nodes)
    if (d[i] <= radius + 1e-12) mask[i] = 1;
  return mask;
}

}  // namespace

CheckReport duality_map_check(const ScalarField& u, const DiscreteMeasure& mu, double tol) {
  double sup = u.max_abs();
  if (sup == 0.0) throw Error(ErrorCode::ZeroFunction, "duality_map_check needs u != 0");
  CheckReport rep;

  double tv = mu.total_variation();
  rep.items.push_back({"unit_mass", std::abs(tv - 1.0) <= tol, std::abs(tv - 1.0),
                       "| |mu|(Omega) - 1 | = " + std::to_string(std::abs(tv - 1.0))});

  auto omax = omega_max_abs(u, tol * sup);
  std::vector<char> in_omax(u.dom->num_nodes(), 0);
  for (int i : omax) in_omax[i] = 1;
  double off_mass = 0.0;
  for (int i : mu.dom->active_nodes)
    if (!in_omax[i]) off_mass += std::abs(mu[i]);
  rep.items.push_back({"support_in_omega_max_abs", off_mass <= tol * std::max(tv, 1e-300), off_mass,
                       "mass outside omega_max_abs = " + std::to_string(off_mass)});

  double worst_polar = 0.0;
  for (int i : mu.dom->active_nodes) {
    if (mu[i] == 0.0) continue;
    double target = u[i] / sup * std::abs(mu[i]);
    worst_polar = std::max(worst_polar, std::abs(mu[i] - target) / std::abs(mu[i]));
  }
  rep.items.push_back({"polar_decomposition", worst_polar <= tol, worst_polar,
                       "max nodewise |mu - (u/sup)|mu|| / |mu| = " + std::to_string(worst_polar)});
  return rep;
}

CheckReport calibration_check(const ScalarField& u, const EdgeFlux& flux, double tol,
                              const MollifierSchedule* schedule, double delta) {
  double J = lip_constant(u);
  if (J == 0.0 || u.max_abs() == 0.0)
    throw Error(ErrorCode::ZeroFunction, "calibration_check needs nonzero u");
  const auto& dom = *u.dom;
  CheckReport rep;

  double tv = flux.total_variation();
  rep.items.push_back({"unit_mass", tv <= 1.0 + tol, std::max(0.0, tv - 1.0),
                       "|sigma|(Omega) = " + std::to_string(tv)});

  double pair = flux_pairing(flux, u);
  rep.items.push_back({"pairing_identity", std::abs(pair - J) <= tol * J, std::abs(pair - J) / J,
                       "<-div sigma, u> = " + std::to_string(pair) + ", J = " + std::to_string(J)});

  MollifierSchedule sched = schedule ? *schedule : MollifierSchedule::default_for(dom.h);
  auto omax = omega_max_grad(u, sched, delta);
  auto mask = dilate_set(u.dom, omax.nodes, sched.radii.back());
  double off = 0.0;
  for (size_t e = 0; e < flux.f.size(); ++e) {
    if (flux.f[e] == 0.0) continue;
    if (!mask[dom.edges[e].a] || !mask[dom.edges[e].b]) off += std::abs(flux.f[e]) * dom.edges[e].len;
  }
  rep.items.push_back({"support_in_omega_max_grad", off <= tol * std::max(tv, 1e-300), off,
                       "flux mass outside dilated Omega_max = " + std::to_string(off)});

  // Alignment: flux signs must follow the edge slopes of u, and the
  // mass-weighted slope along the support must exhaust J. The magnitude part
  // is integral rather than per-edge: a vector sample split conically onto
  // two stencil directions puts mass on edges up to 22.5 degrees off the true
  // direction, whose individual slopes fall short of J by 1 - cos even for a
  // perfect calibration.
  double sign_mis = 0.0, deficit = 0.0;
  for (size_t e = 0; e < flux.f.size(); ++e) {
    double fe = flux.f[e];
    if (fe == 0.0) continue;
    const auto& ed = dom.edges[e];
    double du = u[ed.b] - u[ed.a];
    double mass = std::abs(fe) * ed.len;
    if (fe * du <= 0.0) sign_mis += mass;
    deficit += mass * std::max(0.0, (1.0 - tol) * J - std::abs(du) / ed.len) / J;
  }
  double worst = (sign_mis + deficit) / std::max(tv, 1e-300);
  rep.items.push_back({"slope_alignment", worst <= tol, worst,
                       "sign-mismatch mass = " + std::to_string(sign_mis) +
                           ", slope deficit = " + std::to_string(deficit)});
  return rep;
}

BallCalibration ball_calibration(const DomainPtr& dom) {
  if (!dom->shape || !std::holds_alternative<Disk>(*dom->shape))
    throw Error(ErrorCode::UnsupportedShape, "ball_calibration needs a disk domain");
  const auto& disk = std::get<Disk>(*dom->shape);
  Vec2 c{disk.cx, disk.cy};
  int center = dom->nearest_node(c);
  if (!dom->active(center)) throw Error(ErrorCode::UnsupportedShape, "disk center not active");

  BallCalibration out{DiscreteMeasure(dom), EdgeFlux(dom), center};
  out.nu[center] = 1.0;

  const double pi = std::numbers::pi;
  const double w_axis = dom->h;
  const double w_diag = dom->h / std::numbers::sqrt2;
  // 12-point Gauss-Legendre on [-1/2, 1/2]: the field varies at scale h near
  // the singularity, so transversal face integration (not midpoint sampling)
  // is what makes the discrete divergence collect a clean unit at the center.
  static const double gx[6] = {0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
                               0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
  static const double gw[6] = {0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
                               0.1600783285433462, 0.1069393259953184, 0.0471753363865118};
  for (size_t e = 0; e < dom->edges.size(); ++e) {
    const auto& ed = dom->edges[e];
    Vec2 pa = dom->pos(ed.a), pb = dom->pos(ed.b);
    Vec2 mid = {0.5 * (pa.x + pb.x) - c.x, 0.5 * (pa.y + pb.y) - c.y};
    Vec2 eh = {(pb.x - pa.x) / ed.len, (pb.y - pa.y) / ed.len};
    Vec2 th = {-eh.y, eh.x};  // transversal
    double w = std::abs(std::abs(eh.x) - std::abs(eh.y)) > 0.5 ? w_axis : w_diag;

    double acc = 0.0;
    for (int g = 0; g < 12; ++g) {
      double s = (g < 6 ? -gx[g % 6] : gx[g % 6]) * 0.5 * w;
      double wq = 0.5 * gw[g % 6];
      Vec2 p = {mid.x + s * th.x, mid.y + s * th.y};
      double r2 = dot(p, p);
      if (r2 < 1e-18) continue;
      Vec2 sigma = {-p.x / (2 * pi * r2), -p.y / (2 * pi * r2)};

      // conic split onto the two adjacent stencil directions
      double theta = std::atan2(sigma.y, sigma.x);
      if (theta < 0) theta += 2 * pi;
      int k0 = std::min(7, static_cast<int>(theta / (pi / 4)));
      Vec2 d1{std::cos(k0 * pi / 4), std::sin(k0 * pi / 4)};
      Vec2 d2{std::cos((k0 + 1) * pi / 4), std::sin((k0 + 1) * pi / 4)};
      double det = cross(d1, d2);
      double c1 = cross(sigma, d2) / det;
      double c2 = cross(d1, sigma) / det;
      auto component = [&](Vec2 d, double coef) {
        double align = dot(d, eh);
        if (align > 0.999) acc += wq * coef;
        if (align < -0.999) acc -= wq * coef;
      };
      component(d1, c1);
      component(d2, c2);
    }
    out.flux.f[e] = acc * w;
  }
  return out;
}

CheckReport eigen_system_check(const ScalarField& u, double lambda, const DiscreteMeasure& nu,
                               const EdgeFlux& flux, double tol, const MollifierSchedule* schedule,
                               double delta) {
  double sup = u.max_abs();
  double J = lip_constant(u);
  if (sup == 0.0 || J == 0.0) throw Error(ErrorCode::ZeroFunction, "eigen_system_check needs u != 0");
  for (int i : nu.dom->active_nodes)
    if (nu[i] < -1e-12) throw Error(ErrorCode::SignedMeasure, "nu must be non-negative");
  const auto& dom = *u.dom;
  CheckReport rep;

  double nu_mass = nu.total_mass();
  rep.items.push_back({"nu_mass", std::abs(nu_mass - 1.0 / sup) <= tol / sup,
                       std::abs(nu_mass * sup - 1.0),
                       "nu(Omega) = " + std::to_string(nu_mass) + ", 1/sup = " + std::to_string(1.0 / sup)});

  double tau_mass = flux.total_variation() / J;
  rep.items.push_back({"tau_mass", std::abs(tau_mass - 1.0 / J) <= tol / J,
                       std::abs(tau_mass * J - 1.0),
                       "tau(Omega) = " + std::to_string(tau_mass) + ", 1/J = " + std::to_string(1.0 / J)});

  auto omax_abs = omega_max_abs(u, tol * sup);
  std::vector<char> abs_mask(dom.num_nodes(), 0);
  for (int i : omax_abs) abs_mask[i] = 1;
  double nu_off = 0.0;
  for (int i : dom.active_nodes)
    if (!abs_mask[i]) nu_off += std::abs(nu[i]);
  rep.items.push_back({"nu_support", nu_off <= tol * std::max(nu.total_variation(), 1e-300), nu_off,
                       "nu mass outside omega_max_abs = " + std::to_string(nu_off)});

  MollifierSchedule sched = schedule ? *schedule : MollifierSchedule::default_for(dom.h);
  auto omax = omega_max_grad(u, sched, delta);
  auto grad_mask = dilate_set(u.dom, omax.nodes, sched.radii.back());
  double tau_off = 0.0;
  for (size_t e = 0; e < flux.f.size(); ++e) {
    if (flux.f[e] == 0.0) continue;
    if (!grad_mask[dom.edges[e].a] || !grad_mask[dom.edges[e].b])
      tau_off += std::abs(flux.f[e]) * dom.edges[e].len;
  }
  rep.items.push_back({"tau_support", tau_off <= tol * std::max(flux.total_variation(), 1e-300),
                       tau_off, "flux mass outside dilated Omega_max = " + std::to_string(tau_off)});

  auto div = weak_divergence(flux);
  double scale = 0.0;
  for (int i : dom.active_nodes) scale = std::max(scale, std::abs(nu[i] * u[i]));
  if (scale == 0.0) scale = 1.0;
  double worst = 0.0;
  for (int i : dom.active_nodes) worst = std::max(worst, std::abs(lambda * nu[i] * u[i] + div[i]));
  rep.items.push_back({"pde_residual", worst <= tol * lambda * scale, worst / (lambda * scale),
                       "max |lambda nu u + div sigma| = " + std::to_string(worst)});
  return rep;
}

CheckReport min_equation_check(const ScalarField& u, double lambda, const DiscreteMeasure& nu,
                               const EdgeFlux& flux, double tol) {
  (void)nu;
  CheckReport rep;
  double J = lip_constant(u);
  double neg = 0.0;
  for (int i : u.dom->active_nodes) neg = std::min(neg, u[i]);
  rep.items.push_back({"u_nonneg", neg >= -tol * u.max_abs(), -neg,
                       "min u = " + std::to_string(neg)});

  auto div = weak_divergence(flux);
  double div_scale = 0.0;
  for (int i : u.dom->active_nodes) div_scale = std::max(div_scale, std::abs(div[i]));
  if (div_scale == 0.0) div_scale = 1.0;

  double worst_comp = 0.0, worst_neg = 0.0;
  for (int i : u.dom->active_nodes) {
    double a = (J - lambda * u[i]) / J;          // slope slack, relative to J
    double b = -div[i] / div_scale;              // -div term, relative scale
    worst_neg = std::max({worst_neg, -a, -b});
    worst_comp = std::max(worst_comp, std::min(a, std::abs(b)));
  }
  rep.items.push_back({"nonnegative_terms", worst_neg <= tol, worst_neg,
                       "max negative part = " + std::to_string(worst_neg)});
  rep.items.push_back({"complementarity", worst_comp <= tol, worst_comp,
                       "max_i min(J - lambda u, |div|) (scaled) = " + std::to_string(worst_comp)});
  return rep;
}

CheckReport parallelity_check(const ScalarField& u, const ScalarField& v, const EdgeFlux& flux_u,
                              double tol) {
  (void)u;
  CheckReport rep;
  double Jv = lip_constant(v);
  double tv = flux_u.total_variation();
  double mis_sign = 0.0, mis_slope = 0.0;
  const auto& dom = *v.dom;
  for (size_t e = 0; e < flux_u.f.size(); ++e) {
    double fe = flux_u.f[e];
    if (fe == 0.0) continue;
    const auto& ed = dom.edges[e];
    double du = u[ed.b] - u[ed.a];
    double dv = v[ed.b] - v[ed.a];
    double mass = std::abs(fe) * ed.len;
    if (du * dv <= 0.0) mis_sign += mass;
    if (std::abs(dv) / ed.len < (1.0 - tol) * Jv) mis_slope += mass;
  }
  rep.items.push_back({"sign_agreement", mis_sign <= tol * std::max(tv, 1e-300), mis_sign,
                       "sign-mismatched flux mass = " + std::to_string(mis_sign)});
  rep.items.push_back({"slope_maximal", mis_slope <= tol * std::max(tv, 1e-300), mis_slope,
                       "sub-maximal |grad v| flux mass = " + std::to_string(mis_slope)});
  return rep;
}

namespace {
std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

void save_measure_csv(const DiscreteMeasure& mu, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  const auto& dom = *mu.dom;
  out << (dom.dim == 1 ? "ix,weight\n" : "ix,iy,weight\n");
  for (int i : dom.active_nodes) {
    if (mu[i] == 0.0) continue;
    if (dom.dim == 1)
      out << dom.ix_of(i) << "," << fmt_double(mu[i]) << "\n";
    else
      out << dom.ix_of(i) << "," << dom.iy_of(i) << "," << fmt_double(mu[i]) << "\n";
  }
}

DiscreteMeasure load_measure_csv(const DomainPtr& dom, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  DiscreteMeasure mu(dom);
  std::string line;
  int lineno = 1;
  std::getline(in, line);  // header
  int cols = dom->dim == 1 ? 2 : 3;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != cols)
      throw Error(ErrorCode::FormatError, path + " row " + std::to_string(lineno));
    int ix = std::stoi(cells[0]);
    int iy = cols == 3 ? std::stoi(cells[1]) : 0;
    mu[dom->id(ix, iy)] = std::stod(cells[cols - 1]);
  }
  return mu;
}

void save_flux_csv(const EdgeFlux& flux, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  const auto& dom = *flux.dom;
  out << "ia,ja,ib,jb,flux\n";
  for (size_t e = 0; e < flux.f.size(); ++e) {
    if (flux.f[e] == 0.0) continue;
    const auto& ed = dom.edges[e];
    out << dom.ix_of(ed.a) << "," << dom.iy_of(ed.a) << "," << dom.ix_of(ed.b) << ","
        << dom.iy_of(ed.b) << "," << fmt_double(flux.f[e]) << "\n";
  }
}

EdgeFlux load_flux_csv(const DomainPtr& dom, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::unordered_map<long long, int> edge_of;
  for (size_t e = 0; e < dom->edges.size(); ++e)
    edge_of[static_cast<long long>(dom->edges[e].a) * dom->num_nodes() + dom->edges[e].b] =
        static_cast<int>(e);
  EdgeFlux flux(dom);
  std::string line;
  int lineno = 1;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw Error(ErrorCode::FormatError, path + " row " + std::to_string(lineno));
    int a = dom->id(std::stoi(cells[0]), std::stoi(cells[1]));
    int b = dom->id(std::stoi(cells[2]), std::stoi(cells[3]));
    double val = std::stod(cells[4]);
    if (a > b) {
      std::swap(a, b);
      val = -val;
    }
    auto it = edge_of.find(static_cast<long long>(a) * dom->num_nodes() + b);
    if (it == edge_of.end())
      throw Error(ErrorCode::FormatError, path + " row " + std::to_string(lineno) + ": not an edge");
    flux.f[it->second] = val;
  }
  return flux;
}

}  // namespace linfty
