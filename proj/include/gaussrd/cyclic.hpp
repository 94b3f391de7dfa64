#ifndef GAUSSRD_CYCLIC_HPP
#define GAUSSRD_CYCLIC_HPP

#include <Eigen/Dense>

#include "gaussrd/duality.hpp"

namespace gaussrd::cyclic {

// Direct-problem instance with circulant source covariance and equal
// noise variances. Everything here depends on the source only through
// its eigenvalues.
struct CyclicInstance {
  DirectModel dm;
  Eigen::VectorXd lambda;  // eigenvalues of sigma_x, ascending
  double epsilon = 0.0;    // common noise variance
};

// Validates circulant structure (absolute tolerance 1e-10) and equal
// noise variances; eigenvalues come from a symmetric eigendecomposition.
CyclicInstance make_cyclic(const DirectModel& dm);

// Per-mode effective precisions
//   beta_i(r) = (1/eps) [ a_i - a_i^2 e^{-2r} ],  a_i = lambda_i/(lambda_i+eps).
Eigen::VectorXd mode_precisions(const CyclicInstance& inst, double r);

// tr(b) = L eps + eps^2 sum 1/lambda_i.
double trace_b(const CyclicInstance& inst);

// sum_i 1/beta_i(r); strictly decreasing in r.
double budget_trace(const CyclicInstance& inst, double r);

// The unique r with budget_trace(r) = d_total, clamped to 0 when every
// rate is feasible. Throws DistortionNotPositive when d_total <= tr(b).
double min_feasible_rate(const CyclicInstance& inst, double d_total);

struct CyclicSumRate {
  double value = 0.0;
  double r = 0.0;         // argmin
  bool capped = false;    // minimizer pinned at the rate cap (divergence)
  bool certified = false; // curve conditions held over the scanned range
};

// Sum-rate lower bound: 1-D minimization of
//   1/2 log[ e^{2Lr} |sigma_y + b| / waterfill(beta(r), d + tr(b)) ]
// over r >= min_feasible_rate(d + tr(b)). Equals the true sum rate when
// the instance is certified.
CyclicSumRate sum_rate_lower(const CyclicInstance& inst, double d);

// Exact parametric trade-off curve:
//   R(r) = 1/2 log[ |sigma_y + b| e^{2Lr} prod beta_i(r) ]
//   D(r) = sum 1/beta_i(r) - tr(b).
struct CurvePoint {
  double rate = 0.0;
  double distortion = 0.0;
};
CurvePoint curve_point(const CyclicInstance& inst, double r);

// Sufficient conditions for the trade-off curve to be exact at r:
// rate_local is the r-dependent spread bound on the mode precisions,
// rate_free the r-independent sufficient version.
struct CurveConditions {
  bool rate_local = false;
  bool rate_free = false;
};
CurveConditions curve_conditions(const CyclicInstance& inst, double r);

}  // namespace gaussrd::cyclic

#endif  // GAUSSRD_CYCLIC_HPP
