#pragma once

#include <vector>

#include "linfty/field.hpp"

namespace linfty {

/// Per-node max incident-edge slope |u(a)-u(b)|/len. The field max equals the
/// graph-Lipschitz constant of u, which is what makes discrete duality with
/// the transport module exact.
ScalarField local_slope(const ScalarField& u);

/// Graph-Lipschitz constant (max edge slope). Discrete J_inf on zero-trace fields.
double lip_constant(const ScalarField& u);

/// lip_constant(u) / max|u|. Throws ZeroFunction.
double rayleigh(const ScalarField& u);

/// Nodes where |u| >= max|u| - tol.
std::vector<int> omega_max_abs(const ScalarField& u, double tol);

enum class KernelKind { Box, Triangle };

/// Strictly decreasing mollification radii, all >= h.
struct MollifierSchedule {
  std::vector<double> radii;
  KernelKind kernel = KernelKind::Box;

  static MollifierSchedule default_for(double h);  // {8h, 4h, 2h}, box
  void validate(double h) const;
};

/// Kernel average over the graph ball of the given radius, rescaled by
/// min(1, lip(u)/lip(u_moll)) so mollification never increases the Lipschitz
/// constant.
ScalarField mollify(const ScalarField& u, double radius, KernelKind kernel = KernelKind::Box);

/// Discrete surrogate of the set where |grad u| is maximal in the mollified
/// sense: nodes whose slope at the schedule's last radius reaches
/// (1-delta)*lip_constant(u). Slopes at every radius are kept so the
/// stabilization of the per-node sequence can be inspected.
struct OmegaMaxReport {
  std::vector<int> nodes;                        // members, ascending
  std::vector<char> member;                      // per node id
  std::vector<ScalarField> slopes;               // one slope field per radius
  double threshold = 0.0;
  double lip = 0.0;
};

OmegaMaxReport omega_max_grad(const ScalarField& u, const MollifierSchedule& schedule,
                              double delta);

}  // namespace linfty
