#pragma once

#include <vector>

#include "linfty/metric.hpp"

namespace linfty {

/// Result of one finite-p Rayleigh minimization. u is normalized to
/// max|u| = 1 with positive value at its argmax; lambda is recomputable from
/// u via p_quotient.
struct EigenReport {
  ScalarField u;
  double lambda = 0.0;
  double p = 0.0;
  double pde_residual = 0.0;  // relative weak residual of the p-eigen PDE
  int iterations = 0;
  bool converged = false;
};

struct PSolveOptions {
  int max_iters = 400;
  double tol = 1e-3;            // residual defining `converged`
  double stall_tol = 1e-11;     // relative quotient improvement considered a stall
  int stall_iters = 6;
};

/// Discrete p-Rayleigh quotient ||grad u||_p / ||u||_p with cell quadrature
/// (weight h^dim) and per-cell forward-difference gradients.
double p_quotient(const ScalarField& u, double p);

/// Relative weak residual of lambda^p |u|^{p-2} u + div(|grad u|^{p-2} grad u).
double p_residual(const ScalarField& u, double p);

/// Local minimizer of the discrete quotient by nonlinear-CG descent with
/// renormalization and backtracking line search. Throws BadP for p <= 1;
/// non-convergence is reported through the flag, not thrown.
EigenReport p_eigenpair(const DomainPtr& dom, double p, const ScalarField& init,
                        const PSolveOptions& opts = {});

struct PSweepEntry {
  double p;
  double lambda;
  int iterations;
  bool converged;
};
struct PSweepResult {
  std::vector<PSweepEntry> entries;
  double inradius = 0.0;
  double limit_gap = 0.0;  // |lambda_last - 1/r|
};

/// Warm-started sweep over increasing p, seeded with the distance function.
PSweepResult p_sweep(const DomainPtr& dom, const std::vector<double>& ps,
                     const PSolveOptions& opts = {});

struct InfinityHarmonicOptions {
  double tol = 1e-8;  // sup-change per Gauss-Seidel sweep
  int max_sweeps = 200000;
};

struct InfinityHarmonicResult {
  ScalarField u;
  int sweeps = 0;
  bool data_consistent = true;  // Lipschitz feasibility of the fixed values
  double data_violation = 0.0;
};

/// Monotone midpoint scheme for the infinity-Laplace equation: each free node
/// relaxes to the distance-weighted midpoint of its extreme neighbor pair,
/// Gauss-Seidel in fixed node order. `fixed` must include all Boundary nodes.
/// Inconsistent data only warns (flag in the result); NoConvergence throws.
InfinityHarmonicResult infinity_harmonic(const DomainPtr& dom, const std::vector<int>& fixed,
                                         const std::vector<double>& values,
                                         const InfinityHarmonicOptions& opts = {});

/// Sign-changing minimizer max(r - dist(.,ridge), -d_Omega): equals the inner
/// distance on the inball and dips negative in the pockets outside it.
/// Throws StadiumDomain when the inball covers the whole interior (up to the
/// chamfer budget), where no such minimizer exists.
ScalarField construct_sign_changing(const DomainPtr& dom, const RidgeSet& ridge, double r);

struct EnvelopeReport {
  bool below_dmax = false;       // |u| <= d_Omega + 2h
  bool argmax_on_ridge = false;  // argmax|u| within 2h of the high ridge
  bool above_din = false;        // d_in <= u + 2h, only meaningful when gated
  bool above_din_evaluated = false;
};

/// Distance-envelope diagnostics for a lip-normalized field. Throws
/// NotNormalized when lip_constant(u) differs from 1 beyond 1e-9.
EnvelopeReport check_envelope(const ScalarField& u);

}  // namespace linfty
