#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "linfty/measures.hpp"

namespace linfty {

enum class BoundaryMode {
  None,    // exact balance required (W1)
  Free,    // boundary nodes absorb/emit at zero cost (J*_inf)
  Priced,  // creation/absorption at cost 1 anywhere (KR)
  FreeAndPriced,  // both: boundary free + cost-1 creation (KR_partial)
};

/// Result of a Beckmann-type min-cost flow solve on the stencil graph.
struct FlowResult {
  double value = 0.0;        // sum_e len_e |flux_e| (+ cost-1 virtual mass)
  EdgeFlux flux;             // flow on real edges, oriented low->high positive
  std::vector<double> potential;  // Lipschitz potential certificate, 0 on sinks
  double created_mass = 0.0;      // mass through the cost-1 reservoir
  int augmentations = 0;
};

/// Uncapacitated min-cost transshipment with supplies mu (per active node),
/// solved by successive shortest paths with node potentials; deterministic
/// tie-breaking by node index. Throws UnbalancedMass / SolverFailure.
FlowResult min_cost_flow(const DomainPtr& dom, const std::vector<double>& supply,
                         BoundaryMode mode);

/// J*_inf(mu) = sum_i mu_i * dist(i, boundary) for mu >= 0 (the distance
/// function is the pointwise-maximal admissible potential). Throws SignedMeasure.
double j_star_closed(const DiscreteMeasure& mu);

/// J*_inf(mu) via the Beckmann flow with free boundary; valid for signed mu.
FlowResult j_star_flow(const DiscreteMeasure& mu);

/// Geodesic 1-Wasserstein distance between probability measures.
double w1(const DiscreteMeasure& mu, const DiscreteMeasure& rho);

double kr_norm(const DiscreteMeasure& mu);
double kr_partial_norm(const DiscreteMeasure& mu);

/// Dual Rayleigh quotient |mu|(Omega) / J*_inf(mu). Throws ZeroDual.
double dual_rayleigh(const DiscreteMeasure& mu);

/// Dual-minimizer diagnostics: sampled Diracs never beat the ridge, ridge
/// Diracs attain the inradius, and the normalized duality-map measure
/// maximizes J*_inf among sampled probability measures.
CheckReport dual_minimizer_check(const DomainPtr& dom, int samples, double tol,
                                 std::uint64_t seed);

/// Finite-graph duality: inf R = 1/r equals R* at a ridge Dirac, plus the
/// coercivity bound J*(mu) <= r |mu| on random signed measures.
CheckReport graph_duality_check(const DomainPtr& dom, int samples, double tol,
                                std::uint64_t seed);

}  // namespace linfty
