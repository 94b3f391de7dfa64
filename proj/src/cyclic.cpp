#include "gaussrd/cyclic.hpp"

#include <cmath>

#include "gaussrd/optimize.hpp"
#include "gaussrd/waterfill.hpp"

namespace gaussrd::cyclic {

namespace {

constexpr double kRateCap = 9.210340371976184;  // (1/2) ln 1e8

double logdet_sy_plus_b(const CyclicInstance& inst) {
  // |sigma_y + b| = prod (lambda_i + eps)^2 / lambda_i
  double acc = 0.0;
  for (int i = 0; i < inst.dm.l; ++i)
    acc += 2.0 * std::log(inst.lambda[i] + inst.epsilon) -
           std::log(inst.lambda[i]);
  return acc;
}

}  // namespace

CyclicInstance make_cyclic(const DirectModel& dm) {
  DirectModel checked = validate_direct_model(dm);
  const int l = checked.l;
  for (int i = 1; i < l; ++i) {
    for (int j = 0; j < l; ++j) {
      double expect = checked.sigma_x(0, j);
      double got = checked.sigma_x(i, (j + i) % l);
      if (std::abs(got - expect) > 1e-10)
        throw DimensionMismatch("sigma_x is not circulant");
    }
  }
  double eps = checked.noise_var[0];
  for (int i = 1; i < l; ++i)
    if (std::abs(checked.noise_var[i] - eps) > 1e-12 * (1.0 + eps))
      throw DimensionMismatch("noise variances must be equal");

  CyclicInstance inst;
  inst.dm = std::move(checked);
  inst.epsilon = eps;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inst.dm.sigma_x,
                                                    Eigen::EigenvaluesOnly);
  inst.lambda = es.eigenvalues();
  return inst;
}

Eigen::VectorXd mode_precisions(const CyclicInstance& inst, double r) {
  if (!(r >= 0.0)) throw NegativeRate(std::to_string(r));
  const double eps = inst.epsilon;
  double decay = std::exp(-2.0 * r);
  Eigen::VectorXd beta(inst.dm.l);
  for (int i = 0; i < inst.dm.l; ++i) {
    double a = inst.lambda[i] / (inst.lambda[i] + eps);
    beta[i] = (a - a * a * decay) / eps;
  }
  return beta;
}

double trace_b(const CyclicInstance& inst) {
  return inst.dm.l * inst.epsilon +
         inst.epsilon * inst.epsilon *
             inst.lambda.cwiseInverse().sum();
}

double budget_trace(const CyclicInstance& inst, double r) {
  return mode_precisions(inst, r).cwiseInverse().sum();
}

double min_feasible_rate(const CyclicInstance& inst, double d_total) {
  double floor = trace_b(inst);
  if (d_total <= floor + 1e-12 * (1.0 + floor))
    throw DistortionNotPositive("total budget at or below tr(b)");
  if (d_total >= budget_trace(inst, 0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (budget_trace(inst, hi) > d_total && hi < 1e3) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * (1.0 + hi); ++it) {
    double mid = 0.5 * (lo + hi);
    if (budget_trace(inst, mid) > d_total) lo = mid;
    else                                   hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

double rate_objective(const CyclicInstance& inst, double budget, double r,
                      double ld_syb) {
  Eigen::VectorXd beta = mode_precisions(inst, r);
  WaterSolution sol = water_level(beta, budget);
  double raw = 0.5 * (2.0 * inst.dm.l * r + ld_syb - std::log(sol.omega));
  // the raw bound can dip below zero where the certification lemma fails;
  // a sum rate never does
  return std::max(0.0, raw);
}

}  // namespace

CyclicSumRate sum_rate_lower(const CyclicInstance& inst, double d) {
  if (!(d > 0.0)) throw InfeasibleSpec("distortion must be positive");
  double budget = d + trace_b(inst);
  double r_lo = min_feasible_rate(inst, budget);
  double ld_syb = logdet_sy_plus_b(inst);

  auto f = [&](double r) { return rate_objective(inst, budget, r, ld_syb); };

  CyclicSumRate out;
  if (r_lo >= kRateCap) {
    // the feasible range starts beyond the cap: report, don't truncate
    out.value = std::max(0.0, f(r_lo));
    out.r = r_lo;
    out.capped = true;
    out.certified = false;
    return out;
  }

  // coarse scan then golden refinement around the best bracket; ties go
  // to the smaller rate
  auto better = [](double v, double best) {
    return v < best - 1e-13 * (1.0 + std::abs(best));
  };
  const int n = 1024;
  double best_r = r_lo, best_v = f(r_lo);
  for (int j = 1; j <= n; ++j) {
    double r = r_lo + (kRateCap - r_lo) * j / n;
    double v = f(r);
    if (better(v, best_v)) { best_v = v; best_r = r; }
  }
  double span = (kRateCap - r_lo) / n;
  double a = std::max(r_lo, best_r - span), b = std::min(kRateCap, best_r + span);
  double refined = golden_min(f, a, b);
  if (better(f(refined), best_v)) { best_r = refined; best_v = f(refined); }
  if (!better(best_v, f(r_lo))) { best_r = r_lo; best_v = f(r_lo); }

  out.value = std::max(0.0, best_v);
  out.r = best_r;
  out.capped = best_r >= kRateCap - 1e-6;

  out.certified = true;
  for (int j = 0; j <= 256 && out.certified; ++j) {
    double r = r_lo + (kRateCap - r_lo) * j / 256.0;
    out.certified = curve_conditions(inst, r).rate_local;
  }
  return out;
}

CurvePoint curve_point(const CyclicInstance& inst, double r) {
  if (!(r >= 0.0)) throw NegativeRate(std::to_string(r));
  CurvePoint p;
  if (r == 0.0) {
    // endpoint identities: the log terms cancel algebraically
    p.rate = 0.0;
    p.distortion = inst.dm.sigma_y().trace();
    return p;
  }
  Eigen::VectorXd beta = mode_precisions(inst, r);
  p.rate = 0.5 * (logdet_sy_plus_b(inst) + 2.0 * inst.dm.l * r +
                  beta.array().log().sum());
  if (std::abs(p.rate) < 1e-12) p.rate = 0.0;
  p.distortion = beta.cwiseInverse().sum() - trace_b(inst);
  return p;
}

CurveConditions curve_conditions(const CyclicInstance& inst, double r) {
  const int l = inst.dm.l;
  CurveConditions cond;
  if (l == 1) {
    cond.rate_local = cond.rate_free = true;
    return cond;
  }
  Eigen::VectorXd beta = mode_precisions(inst, r);
  int i0, i1;
  beta.minCoeff(&i0);
  beta.maxCoeff(&i1);
  const double eps = inst.epsilon;
  double lam_max = inst.lambda.maxCoeff();
  double c = (lam_max + eps) / lam_max;
  double factor = c * c * l / (l - 1.0);

  double lhs_local = beta[i1] - beta[i0];
  double rhs_local = eps * std::exp(2.0 * r) * factor * beta[i0] * beta[i0];
  cond.rate_local = lhs_local <= rhs_local + 1e-12 * (1.0 + rhs_local);

  auto shrink = [&](int i) {
    return inst.lambda[i] / (inst.lambda[i] + eps);
  };
  double lhs_free = shrink(i1) - shrink(i0);
  double rhs_free = 4.0 * factor * shrink(i0) * shrink(i0) * shrink(i1);
  cond.rate_free = lhs_free <= rhs_free + 1e-12 * (1.0 + rhs_free);
  return cond;
}

}  // namespace gaussrd::cyclic
