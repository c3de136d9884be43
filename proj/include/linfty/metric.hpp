#pragma once

#include <vector>

#include "linfty/field.hpp"

namespace linfty {

/// Argmax plateau of a distance field.
struct RidgeSet {
  std::vector<int> nodes;  // ascending ids
  double tol = 0.0;
};

/// Graph-geodesic distance to the Boundary node set (multi-source Dijkstra
/// on the stencil graph). Zero-trace by construction and 1-Lipschitz in the
/// graph metric; overestimates Euclidean geodesics by at most sec(pi/8)-1.
ScalarField distance_to_boundary(const DomainPtr& dom);

/// Graph-geodesic distance to an arbitrary seed set, optionally with initial
/// values per seed (defaults to zero). Throws EmptySeedSet.
ScalarField distance_to_set(const DomainPtr& dom, const std::vector<int>& seeds);
ScalarField distance_to_set(const DomainPtr& dom, const std::vector<int>& seeds,
                            const std::vector<double>& seed_values);

/// Discrete inradius r = max node value of a boundary distance field.
double inradius(const ScalarField& dist);

/// Nodes with value >= max - tol. Default tol is the grid spacing.
RidgeSet high_ridge(const ScalarField& dist, double tol);

/// Generalized inball: nodes with distance to the ridge strictly below r.
std::vector<int> generalized_inball(const DomainPtr& dom, const RidgeSet& ridge, double r);

/// Inner distance d_in = max(r - dist(. , ridge), 0), cross-checked against
/// the distance transform inside the generalized inball (within 2h).
/// Throws CrossCheckFailure when the two routes disagree.
ScalarField inner_distance(const DomainPtr& dom, const RidgeSet& ridge, double r);

}  // namespace linfty
