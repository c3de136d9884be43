#pragma once

#include <string>
#include <vector>

#include "linfty/lipcalc.hpp"
#include "linfty/metric.hpp"

namespace linfty {

/// Signed per-node weights standing in for measures on Omega.
struct DiscreteMeasure {
  DomainPtr dom;
  std::vector<double> w;

  DiscreteMeasure() = default;
  explicit DiscreteMeasure(DomainPtr d) : dom(std::move(d)), w(dom->num_nodes(), 0.0) {}

  double& operator[](int i) { return w[i]; }
  double operator[](int i) const { return w[i]; }

  double total_variation() const;
  double total_mass() const;
  std::vector<int> support(double eps = 0.0) const;
  bool is_probability(double tol = 1e-12) const;
};

/// Per-edge signed flow standing in for vector measures sigma. Orientation is
/// low index -> high index positive; the total variation is length-weighted,
/// sum_e |flux_e| * len_e, so it discretizes |sigma|(Omega).
struct EdgeFlux {
  DomainPtr dom;
  std::vector<double> f;  // one slot per dom->edges entry

  EdgeFlux() = default;
  explicit EdgeFlux(DomainPtr d) : dom(std::move(d)), f(dom->edges.size(), 0.0) {}

  double total_variation() const;
  void scale(double c);
};

/// Node divergence of an edge flux: div = (flux out) - (flux in), which makes
/// the summation-by-parts identity sum_i phi_i div_i = sum_e (phi_a - phi_b) f_e
/// exact and matches the continuum convention (a source has positive
/// divergence). A calibration of u points up-gradient, so -div(sigma) is a
/// positive multiple of a Dirac at the peak.
DiscreteMeasure weak_divergence(const EdgeFlux& flux);

double pairing(const DiscreteMeasure& mu, const ScalarField& u);  // <mu, u>

/// <-div sigma, u> computed edge-wise; equals pairing(weak_divergence, -u)...
double flux_pairing(const EdgeFlux& flux, const ScalarField& u);

struct CheckItem {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // worst violation in the condition's own units
  std::string detail;
};

struct CheckReport {
  std::vector<CheckItem> items;
  bool passed() const {
    for (auto& it : items)
      if (!it.passed) return false;
    return true;
  }
  const CheckItem* find(const std::string& name) const {
    for (auto& it : items)
      if (it.name == name) return &it;
    return nullptr;
  }
};

/// Duality-map membership: |mu|(Omega)=1, support inside omega_max_abs, and
/// the polar decomposition mu = (u/||u||_inf)|mu| nodewise.
CheckReport duality_map_check(const ScalarField& u, const DiscreteMeasure& mu, double tol);

/// Calibration membership for -div(sigma) in the subdifferential of the
/// Lipschitz functional at u: unit mass, pairing identity, support in the
/// dilated omega_max_grad set, and edge-wise alignment with maximal slopes.
CheckReport calibration_check(const ScalarField& u, const EdgeFlux& flux, double tol,
                              const MollifierSchedule* schedule = nullptr, double delta = 0.05);

/// Example flux on a disk: nu = delta at the center node and sigma sampled
/// from the gradient of the plane fundamental solution, split conically onto
/// the two adjacent stencil directions (axis width h, diagonal width h/sqrt2)
/// so that weak_divergence approximates a unit Dirac at the center.
struct BallCalibration {
  DiscreteMeasure nu;
  EdgeFlux flux;
  int center_node = -1;
};
BallCalibration ball_calibration(const DomainPtr& dom);

/// Full eigen-system diagnostics for (u, lambda, nu, flux): masses
/// nu(Omega)=1/||u||, |sigma|(Omega)=1/J(u), supports, and the PDE
/// lambda*nu*u = -div(flux) nodewise within tol*lambda.
CheckReport eigen_system_check(const ScalarField& u, double lambda, const DiscreteMeasure& nu,
                               const EdgeFlux& flux, double tol,
                               const MollifierSchedule* schedule = nullptr, double delta = 0.05);

/// Complementarity min(J(u) - lambda*u, -div(flux)) = 0 within tol.
CheckReport min_equation_check(const ScalarField& u, double lambda, const DiscreteMeasure& nu,
                               const EdgeFlux& flux, double tol);

/// Edge-wise parallelity of grad u and grad v on the support of flux_u.
CheckReport parallelity_check(const ScalarField& u, const ScalarField& v, const EdgeFlux& flux_u,
                              double tol);

/// CSV io: measures as `ix[,iy],weight`, fluxes as `ia,ja,ib,jb,flux`.
void save_measure_csv(const DiscreteMeasure& mu, const std::string& path);
DiscreteMeasure load_measure_csv(const DomainPtr& dom, const std::string& path);
void save_flux_csv(const EdgeFlux& flux, const std::string& path);
EdgeFlux load_flux_csv(const DomainPtr& dom, const std::string& path);

}  // namespace linfty
