#include "linfty/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "linfty/lipcalc.hpp"

namespace linfty {

namespace {

struct Cell {
  int base, east, north;  // north < 0 in 1D
};

std::vector<Cell> make_cells(const GridDomain& dom) {
  std::vector<Cell> cells;
  for (int iy = 0; iy < dom.ny; ++iy)
    for (int ix = 0; ix + 1 < dom.nx; ++ix) {
      int b = dom.id(ix, iy);
      int e = dom.id(ix + 1, iy);
      if (dom.dim == 1) {
        if (dom.active(b) && dom.active(e)) cells.push_back({b, e, -1});
        continue;
      }
      if (iy + 1 >= dom.ny) continue;
      int n = dom.id(ix, iy + 1);
      if (dom.active(b) && dom.active(e) && dom.active(n)) cells.push_back({b, e, n});
    }
  return cells;
}

struct QuotientEval {
  double lambda = 0.0;
  double gmax = 0.0, umax = 0.0;
  double se = 0.0, sn = 0.0;  // scaled power sums
};

QuotientEval eval_quotient(const GridDomain& dom, const std::vector<Cell>& cells,
                           const std::vector<double>& u, double p) {
  QuotientEval q;
  double h = dom.h;
  for (const auto& c : cells) {
    double gx = (u[c.east] - u[c.base]) / h;
    double gy = c.north >= 0 ? (u[c.north] - u[c.base]) / h : 0.0;
    q.gmax = std::max(q.gmax, std::hypot(gx, gy));
  }
  for (int i : dom.active_nodes) q.umax = std::max(q.umax, std::abs(u[i]));
  if (q.gmax == 0.0 || q.umax == 0.0) return q;
  for (const auto& c : cells) {
    double gx = (u[c.east] - u[c.base]) / h;
    double gy = c.north >= 0 ? (u[c.north] - u[c.base]) / h : 0.0;
    q.se += std::pow(std::hypot(gx, gy) / q.gmax, p);
  }
  for (int i : dom.active_nodes) q.sn += std::pow(std::abs(u[i]) / q.umax, p);
  q.lambda = q.gmax / q.umax * std::pow(q.se / q.sn, 1.0 / p);
  return q;
}

// gradient of log(E/N); also returns the scaled weak residual
void quotient_gradient(const GridDomain& dom, const std::vector<Cell>& cells,
                       const std::vector<double>& u, double p, const QuotientEval& q,
                       std::vector<double>* grad, double* residual) {
  double h = dom.h;
  std::vector<double> t(dom.num_nodes(), 0.0);  // sum_c W_c (g . dg/du_i), times h
  for (const auto& c : cells) {
    double gx = (u[c.east] - u[c.base]) / h;
    double gy = c.north >= 0 ? (u[c.north] - u[c.base]) / h : 0.0;
    double g = std::hypot(gx, gy);
    if (g == 0.0) continue;
    double w = std::pow(g / q.gmax, p - 2.0);
    t[c.base] -= w * (gx + gy);
    t[c.east] += w * gx;
    if (c.north >= 0) t[c.north] += w * gy;
  }
  if (grad) {
    grad->assign(dom.num_nodes(), 0.0);
    for (int i : dom.active_nodes) {
      if (dom.boundary(i)) continue;  // zero-trace constraint
      double de = p * t[i] / (h * q.gmax * q.gmax * q.se);
      double dn =
          p * std::copysign(std::pow(std::abs(u[i]) / q.umax, p - 1.0), u[i]) / (q.umax * q.sn);
      (*grad)[i] = de - dn;
    }
  }
  if (residual) {
    double worst = 0.0;
    for (int i : dom.active_nodes) {
      if (dom.boundary(i)) continue;
      double mass = std::copysign(std::pow(std::abs(u[i]) / q.umax, p - 1.0), u[i]);
      double diff = t[i] * q.umax * q.sn / (h * q.gmax * q.gmax * q.se);
      worst = std::max(worst, std::abs(mass - diff));
    }
    *residual = worst;
  }
}

}  // namespace

double p_quotient(const ScalarField& u, double p) {
  if (!(p > 1.0)) throw Error(ErrorCode::BadP, "p must exceed 1");
  auto cells = make_cells(*u.dom);
  auto q = eval_quotient(*u.dom, cells, u.v, p);
  if (q.umax == 0.0) throw Error(ErrorCode::ZeroFunction, "p_quotient of zero field");
  return q.lambda;
}

double p_residual(const ScalarField& u, double p) {
  if (!(p > 1.0)) throw Error(ErrorCode::BadP, "p must exceed 1");
  auto cells = make_cells(*u.dom);
  auto q = eval_quotient(*u.dom, cells, u.v, p);
  if (q.umax == 0.0 || q.gmax == 0.0)
    throw Error(ErrorCode::ZeroFunction, "p_residual of degenerate field");
  double res = 0.0;
  quotient_gradient(*u.dom, cells, u.v, p, q, nullptr, &res);
  return res;
}

EigenReport p_eigenpair(const DomainPtr& dom, double p, const ScalarField& init,
                        const PSolveOptions& opts) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorCode::BadP, "p must lie in (1, inf)");
  auto cells = make_cells(*dom);

  std::vector<double> u = init.v;
  for (int i : dom->boundary_nodes) u[i] = 0.0;

  auto q = eval_quotient(*dom, cells, u, p);
  if (q.umax == 0.0) throw Error(ErrorCode::ZeroFunction, "initial field vanishes");

  std::vector<double> grad, dir, prev_grad;
  double t_init = 0.1 * q.umax;
  int stall = 0;
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    double res = 0.0;
    quotient_gradient(*dom, cells, u, p, q, &grad, &res);
    if (res <= opts.tol) break;

    // Polak-Ribiere+ direction with reset safeguards
    double beta = 0.0;
    if (!prev_grad.empty() && iter % 50 != 0) {
      double num = 0.0, den = 0.0;
      for (int i : dom->active_nodes) {
        num += grad[i] * (grad[i] - prev_grad[i]);
        den += prev_grad[i] * prev_grad[i];
      }
      if (den > 0.0) beta = std::max(0.0, num / den);
    }
    if (dir.empty()) dir.assign(dom->num_nodes(), 0.0);
    double descent = 0.0;
    for (int i : dom->active_nodes) {
      dir[i] = -grad[i] + beta * dir[i];
      descent += dir[i] * grad[i];
    }
    if (descent >= 0.0) {
      for (int i : dom->active_nodes) dir[i] = -grad[i];
    }

    // normalize step scale against the direction's own magnitude
    double dmax = 0.0;
    for (int i : dom->active_nodes) dmax = std::max(dmax, std::abs(dir[i]));
    if (dmax == 0.0) break;

    auto lam_at = [&](double t) {
      std::vector<double> trial = u;
      for (int i : dom->active_nodes) trial[i] += t * dir[i];
      return eval_quotient(*dom, cells, trial, p).lambda;
    };

    double lam0 = q.lambda;
    double t = t_init / dmax * q.umax;
    double lt = lam_at(t);
    int guard = 0;
    if (lt < lam0) {
      while (guard++ < 40) {
        double l2 = lam_at(2 * t);
        if (l2 >= lt) break;
        t *= 2;
        lt = l2;
      }
    } else {
      while (lt >= lam0 && guard++ < 60) {
        t *= 0.5;
        lt = lam_at(t);
      }
    }
    if (lt >= lam0) {
      ++stall;
      if (stall >= opts.stall_iters) break;
      prev_grad = grad;
      continue;
    }

    // small golden refinement inside [0, 2t]
    double a = 0.0, b = 2 * t;
    double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = lam_at(x1), f2 = lam_at(x2);
    for (int k = 0; k < 10; ++k) {
      if (f1 <= f2) {
        b = x2, x2 = x1, f2 = f1;
        x1 = b - gr * (b - a);
        f1 = lam_at(x1);
      } else {
        a = x1, x1 = x2, f1 = f2;
        x2 = a + gr * (b - a);
        f2 = lam_at(x2);
      }
    }
    double tbest = f1 <= f2 ? x1 : x2;
    double lbest = std::min(f1, f2);
    if (lbest >= lam0) {
      tbest = t;
      lbest = lt;
    }

    for (int i : dom->active_nodes) u[i] += tbest * dir[i];
    t_init = std::max(1e-6, tbest * dmax / q.umax);
    prev_grad = grad;

    double lam_prev = lam0;
    q = eval_quotient(*dom, cells, u, p);
    if (lam_prev - q.lambda <= opts.stall_tol * lam_prev) {
      if (++stall >= opts.stall_iters) break;
    } else {
      stall = 0;
    }
  }

  EigenReport rep;
  rep.p = p;
  rep.iterations = iter;
  q = eval_quotient(*dom, cells, u, p);
  rep.lambda = q.lambda;
  quotient_gradient(*dom, cells, u, p, q, nullptr, &rep.pde_residual);
  rep.converged = rep.pde_residual <= opts.tol;

  // report normalization: max|u| = 1, positive at the argmax
  int arg = -1;
  double best = -1.0;
  for (int i : dom->active_nodes)
    if (std::abs(u[i]) > best) {
      best = std::abs(u[i]);
      arg = i;
    }
  double scale = u[arg] > 0 ? 1.0 / best : -1.0 / best;
  rep.u = ScalarField(dom);
  for (int i : dom->active_nodes) rep.u[i] = u[i] * scale;
  return rep;
}

PSweepResult p_sweep(const DomainPtr& dom, const std::vector<double>& ps,
                     const PSolveOptions& opts) {
  if (ps.empty()) throw Error(ErrorCode::InvalidArgument, "empty p list");
  for (size_t k = 0; k < ps.size(); ++k) {
    if (!(ps[k] > 1.0)) throw Error(ErrorCode::BadP, "each p must exceed 1");
    if (k > 0 && !(ps[k] > ps[k - 1]))
      throw Error(ErrorCode::InvalidArgument, "p values must increase");
  }
  PSweepResult out;
  auto d = distance_to_boundary(dom);
  out.inradius = inradius(d);
  ScalarField u = d;
  for (double p : ps) {
    auto rep = p_eigenpair(dom, p, u, opts);
    out.entries.push_back({p, rep.lambda, rep.iterations, rep.converged});
    u = rep.u;
  }
  out.limit_gap = std::abs(out.entries.back().lambda - 1.0 / out.inradius);
  return out;
}

InfinityHarmonicResult infinity_harmonic(const DomainPtr& dom, const std::vector<int>& fixed,
                                         const std::vector<double>& values,
                                         const InfinityHarmonicOptions& opts) {
  if (fixed.size() != values.size())
    throw Error(ErrorCode::InvalidArgument, "fixed/values size mismatch");
  std::vector<char> is_fixed(dom->num_nodes(), 0);
  std::vector<double> fval(dom->num_nodes(), 0.0);
  for (size_t k = 0; k < fixed.size(); ++k) {
    if (!dom->active(fixed[k])) throw Error(ErrorCode::InvalidArgument, "fixed node not active");
    is_fixed[fixed[k]] = 1;
    fval[fixed[k]] = values[k];
  }
  for (int b : dom->boundary_nodes)
    if (!is_fixed[b])
      throw Error(ErrorCode::InvalidArgument, "fixed set must contain all boundary nodes");

  // McShane envelopes: U = min_i (f_i + d(x,i)), L = max_i (f_i - d(x,i));
  // they certify Lipschitz feasibility and give a good starting iterate.
  double fmin = *std::min_element(values.begin(), values.end());
  double fmax = *std::max_element(values.begin(), values.end());
  std::vector<double> up_keys(values.size()), lo_keys(values.size());
  for (size_t k = 0; k < values.size(); ++k) {
    up_keys[k] = values[k] - fmin;
    lo_keys[k] = fmax - values[k];
  }
  auto upper = distance_to_set(dom, fixed, up_keys);   // = U - fmin
  auto lower = distance_to_set(dom, fixed, lo_keys);   // = fmax - L

  InfinityHarmonicResult res;
  res.u = ScalarField(dom);
  double viol = 0.0;
  for (size_t k = 0; k < fixed.size(); ++k) {
    double L = fmax - lower[fixed[k]];
    viol = std::max(viol, L - values[k]);
  }
  // feasibility slack at the grid scale: the graph metric quantizes distances
  res.data_violation = viol;
  res.data_consistent = viol <= 2 * dom->h * std::max(1.0, fmax - fmin);

  for (int i : dom->active_nodes)
    res.u[i] = is_fixed[i] ? fval[i] : 0.5 * ((upper[i] + fmin) + (fmax - lower[i]));

  auto& u = res.u;

  // Relaxation value: equalize the extreme directional slopes over the
  // stencil hull. Plain 8-direction min/max carries an O(1 - cos(pi/8))
  // angular bias that does not vanish with h, so the sectors are subdivided;
  // virtual directions interpolate the two flanking difference quotients
  // (slope interpolation is exact on cones centered at the node, which keeps
  // ridge tips sharp). Monotone in every neighbor value.
  struct Sample {
    int a, b;        // flanking neighbor slots (0..7)
    double wa, wb;   // quotient weights (1-t)/d_a and t/d_b
  };
  const int kSub = 4;
  static thread_local std::vector<Sample> samples;
  samples.clear();
  if (dom->dim == 2) {
    for (int k = 0; k < 8; ++k) {
      double da = (k % 2 == 0) ? dom->h : dom->h * std::numbers::sqrt2;
      double db = (k % 2 == 1) ? dom->h : dom->h * std::numbers::sqrt2;
      for (int s = 0; s < kSub; ++s) {
        double t = static_cast<double>(s) / kSub;
        samples.push_back({k, (k + 1) % 8, (1 - t) / da, t / db});
      }
    }
  }

  // neighbor slot lookup by (dx, dy)
  auto slot_of = [](int dx, int dy) {
    static const int lut[3][3] = {{5, 4, 3}, {6, -1, 2}, {7, 0, 1}};  // [dx+1][dy+1]
    return lut[dx + 1][dy + 1];
  };

  std::vector<double> nb(8);
  for (res.sweeps = 1; res.sweeps <= opts.max_sweeps; ++res.sweeps) {
    double change = 0.0;
    // alternate sweep direction so information propagates both ways
    bool fwd = res.sweeps % 2 == 1;
    for (size_t idx = 0; idx < dom->active_nodes.size(); ++idx) {
      int i = dom->active_nodes[fwd ? idx : dom->active_nodes.size() - 1 - idx];
      if (is_fixed[i]) continue;
      double v;
      if (dom->dim == 1) {
        v = 0.5 * (u[i - 1] + u[i + 1]);
      } else {
        for (auto [j, e] : dom->neighbors(i)) {
          (void)e;
          nb[slot_of(dom->ix_of(j) - dom->ix_of(i), dom->iy_of(j) - dom->iy_of(i))] = u[j];
        }
        // equalize max ascending and descending slopes over the sampled hull;
        // each sample's slope is a - b*w with a = wa*u_a + wb*u_b, b = wa+wb
        double w = u[i];
        int hi_prev = -1, lo_prev = -1;
        for (int round = 0; round < 8; ++round) {
          double best_hi = -std::numeric_limits<double>::infinity();
          double best_lo = best_hi;
          int hi = 0, lo = 0;
          for (int s = 0; s < static_cast<int>(samples.size()); ++s) {
            const auto& sm = samples[s];
            double a = sm.wa * nb[sm.a] + sm.wb * nb[sm.b];
            double b = sm.wa + sm.wb;
            double up = a - b * w, dn = b * w - a;
            if (up > best_hi) best_hi = up, hi = s;
            if (dn > best_lo) best_lo = dn, lo = s;
          }
          if (hi == hi_prev && lo == lo_prev) break;
          hi_prev = hi, lo_prev = lo;
          const auto& sa = samples[hi];
          const auto& sb = samples[lo];
          double aa = sa.wa * nb[sa.a] + sa.wb * nb[sa.b];
          double ab = sb.wa * nb[sb.a] + sb.wb * nb[sb.b];
          w = (aa + ab) / (sa.wa + sa.wb + sb.wa + sb.wb);
        }
        v = w;
      }
      change = std::max(change, std::abs(v - u[i]));
      u[i] = v;
    }
    if (change <= opts.tol) return res;
  }
  throw Error(ErrorCode::NoConvergence, "infinity-harmonic sweeps exhausted");
}

ScalarField construct_sign_changing(const DomainPtr& dom, const RidgeSet& ridge, double r) {
  if (ridge.nodes.empty()) throw Error(ErrorCode::EmptySeedSet, "empty ridge");
  auto d = distance_to_boundary(dom);
  auto dr = distance_to_set(dom, ridge.nodes);

  // stadium detection with the chamfer budget: if every interior node lies
  // within sec(pi/8)*r + 2h of the ridge, the inball covers the domain and
  // the construction is impossible
  const double budget = r / std::cos(std::numbers::pi / 8) + 2 * dom->h;
  bool stadium = true;
  for (int i : dom->interior_nodes)
    if (dr[i] >= budget) {
      stadium = false;
      break;
    }
  if (stadium)
    throw Error(ErrorCode::StadiumDomain,
                "generalized inball covers the interior; no sign-changing minimizer");

  // inner cone clipped by the boundary distance (the tol-wide ridge plateau
  // deflates dr by up to tol, which would otherwise leak positive values onto
  // the boundary), with the negative McShane extension in the pockets
  ScalarField out(dom);
  for (int i : dom->active_nodes) out[i] = std::max(std::min(r - dr[i], d[i]), -d[i]);
  return out;
}

EnvelopeReport check_envelope(const ScalarField& u) {
  double lip = lip_constant(u);
  if (std::abs(lip - 1.0) > 1e-9)
    throw Error(ErrorCode::NotNormalized, "check_envelope expects lip_constant(u) = 1");
  const auto& dom = u.dom;
  double h = dom->h;
  auto d = distance_to_boundary(dom);
  double r = inradius(d);
  auto ridge = high_ridge(d, h);
  auto din = inner_distance(dom, ridge, r);

  EnvelopeReport rep;
  rep.below_dmax = true;
  for (int i : dom->active_nodes)
    if (std::abs(u[i]) > d[i] + 2 * h) {
      rep.below_dmax = false;
      break;
    }

  auto dr = distance_to_set(dom, ridge.nodes);
  rep.argmax_on_ridge = true;
  for (int i : omega_max_abs(u, h * lip))
    if (dr[i] > 2 * h + 1e-12) {
      rep.argmax_on_ridge = false;
      break;
    }

  if (rep.argmax_on_ridge) {
    rep.above_din_evaluated = true;
    rep.above_din = true;
    for (int i : dom->active_nodes)
      if (din[i] > u[i] + 2 * h) {
        rep.above_din = false;
        break;
      }
  }
  return rep;
}

}  // namespace linfty
