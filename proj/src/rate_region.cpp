#include "gaussrd/rate_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaussrd/optimize.hpp"
#include "gaussrd/waterfill.hpp"

namespace gaussrd {

namespace {

constexpr double kRateCap = 6.907755278982137;  // (1/2) ln 1e6

void check_subset_dim(const SourceModel& model) {
  if (model.l > kMaxSubsetDim)
    throw DimensionMismatch("subset enumeration supports l <= 16");
}

Eigen::VectorXd zero_on_subset(const Eigen::VectorXd& u, SubsetMask s) {
  Eigen::VectorXd out = u;
  for (int i = 0; i < u.size(); ++i)
    if (s & (1u << i)) out[i] = 0.0;
  return out;
}

double sum_rates_on(const Eigen::VectorXd& r, SubsetMask s) {
  double acc = 0.0;
  for (int i = 0; i < r.size(); ++i)
    if (s & (1u << i)) acc += r[i];
  return acc;
}

// gamma G(u)^{-1} gamma^T
Eigen::MatrixXd distortion_matrix(const SourceModel& model,
                                  const Eigen::MatrixXd& gamma,
                                  const Eigen::VectorXd& u) {
  Eigen::MatrixXd m =
      gamma * inverse_pd(information_matrix(model, u)) * gamma.transpose();
  return 0.5 * (m + m.transpose().eval());
}

}  // namespace

RateVector::RateVector(Eigen::VectorXd v) : rates(std::move(v)) {
  for (int i = 0; i < rates.size(); ++i)
    if (!std::isfinite(rates[i]) || rates[i] < 0.0)
      throw NegativeRate("rate vector entry " + std::to_string(i));
}

double lower_rate_bound(const SourceModel& model, SubsetMask s, double theta,
                        const RateAllocation& r) {
  check_subset_dim(model);
  if (s == 0) throw EmptySubset("lower_rate_bound");
  if (!(theta > 0.0)) throw NonpositiveTheta(std::to_string(theta));
  Eigen::VectorXd u = scaled_noise_precisions(model, r);
  double logdet_rest = logdet_pd(information_matrix(model, zero_on_subset(u, s)));
  double val = 2.0 * sum_rates_on(r.r, s) - std::log(theta) - logdet_rest;
  return 0.5 * std::max(0.0, val);
}

double upper_rate_bound(const SourceModel& model, SubsetMask s,
                        const RateAllocation& r) {
  check_subset_dim(model);
  if (s == 0) throw EmptySubset("upper_rate_bound");
  Eigen::VectorXd u = scaled_noise_precisions(model, r);
  double logdet_full = logdet_pd(information_matrix(model, u));
  double logdet_rest = logdet_pd(information_matrix(model, zero_on_subset(u, s)));
  double val = logdet_full + 2.0 * sum_rates_on(r.r, s) - logdet_rest;
  return 0.5 * std::max(0.0, val);
}

bool feasible(const SourceModel& model, const DistortionSpec& spec,
              const RateAllocation& r) {
  validate_spec(spec, model.k);
  Eigen::VectorXd u = scaled_noise_precisions(model, r);
  if (const auto* m = std::get_if<MatrixDistortion>(&spec)) {
    Eigen::MatrixXd err = inverse_pd(information_matrix(model, u));
    return psd_leq(err, m->sigma_d);
  }
  if (const auto* v = std::get_if<VectorDistortion>(&spec)) {
    Eigen::MatrixXd dm = distortion_matrix(model, v->gamma, u);
    double tol = psd_tolerance(dm);
    for (int i = 0; i < model.k; ++i)
      if (dm(i, i) > v->d[i] + tol) return false;
    return true;
  }
  const auto& sd = std::get<SumDistortion>(spec);
  Eigen::MatrixXd dm = distortion_matrix(model, sd.gamma, u);
  return dm.trace() <= sd.d + psd_tolerance(dm);
}

double feasibility_margin(const SourceModel& model,
                          const DistortionSpec& spec) {
  validate_spec(spec, model.k);
  Eigen::MatrixXd cond = conditional_covariance(model);
  if (const auto* m = std::get_if<MatrixDistortion>(&spec)) {
    Eigen::MatrixXd diff = m->sigma_d - cond;
    diff = 0.5 * (diff + diff.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
  if (const auto* v = std::get_if<VectorDistortion>(&spec)) {
    Eigen::MatrixXd floor = v->gamma * cond * v->gamma.transpose();
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < model.k; ++i)
      margin = std::min(margin, v->d[i] - floor(i, i));
    return margin;
  }
  const auto& sd = std::get<SumDistortion>(spec);
  return sd.d - (sd.gamma * cond * sd.gamma.transpose()).trace();
}

void require_nonvoid(const SourceModel& model, const DistortionSpec& spec) {
  double margin = feasibility_margin(model, spec);
  if (margin <= 1e-12 * (1.0 + std::abs(margin)))
    throw InfeasibleSpec("distortion spec at or below the nonvoidness "
                         "threshold (margin " + std::to_string(margin) + ")");
}

SubsetFunction subset_bounds(const SourceModel& model, const RateAllocation& r,
                             std::optional<double> theta) {
  check_subset_dim(model);
  const int l = model.l;
  SubsetFunction f;
  f.l = l;
  f.values.assign(1u << l, 0.0);
  Eigen::VectorXd u = scaled_noise_precisions(model, r);
  double logdet_full = logdet_pd(information_matrix(model, u));
  for (SubsetMask s = 1; s < (1u << l); ++s) {
    double logdet_rest =
        logdet_pd(information_matrix(model, zero_on_subset(u, s)));
    double val;
    if (theta)
      val = 2.0 * sum_rates_on(r.r, s) - std::log(*theta) - logdet_rest;
    else
      val = logdet_full + 2.0 * sum_rates_on(r.r, s) - logdet_rest;
    f.values[s] = 0.5 * std::max(0.0, val);
  }
  return f;
}

bool polyhedron_contains(const SourceModel& model, const RateVector& rv,
                         const RateAllocation& r, std::optional<double> theta) {
  if (rv.size() != model.l || r.size() != model.l)
    throw DimensionMismatch("rate vector / allocation length != l");
  SubsetFunction f = subset_bounds(model, r, theta);
  for (SubsetMask s = 1; s < (1u << model.l); ++s) {
    double bound = f(s);
    if (sum_rates_on(rv.rates, s) < bound - 1e-12 * (1.0 + bound))
      return false;
  }
  return true;
}

std::vector<LawViolation> copolymatroid_violations(
    const SourceModel& model, const RateAllocation& r,
    std::optional<double> theta) {
  SubsetFunction f = subset_bounds(model, r, theta);
  const SubsetMask full = (1u << model.l) - 1;
  std::vector<LawViolation> out;
  auto tol = [](double a, double b) {
    return 1e-9 * (1.0 + std::abs(a) + std::abs(b));
  };
  if (f.values[0] != 0.0)
    out.push_back({LawViolation::Kind::EmptySet, 0, 0, f.values[0]});
  for (SubsetMask a = 0; a <= full; ++a) {
    for (SubsetMask b = 0; b <= full; ++b) {
      if ((a & b) == a && a != b) {  // a proper subset of b
        double gap = f(a) - f(b);
        if (gap > tol(f(a), f(b)))
          out.push_back({LawViolation::Kind::Monotone, a, b, gap});
      }
      if (a < b) {
        double gap = f(a) + f(b) - f(a & b) - f(a | b);
        if (gap > tol(f(a), f(b)))
          out.push_back({LawViolation::Kind::Supermodular, a, b, gap});
      }
    }
  }
  return out;
}

RateVector corner_point(const SourceModel& model, const RateAllocation& r,
                        const std::vector<int>& order) {
  check_subset_dim(model);
  if (static_cast<int>(order.size()) != model.l)
    throw DimensionMismatch("order must be a permutation of 0..l-1");
  Eigen::VectorXd rates = Eigen::VectorXd::Zero(model.l);
  SubsetMask prefix = 0;
  double prev = 0.0;
  for (int idx : order) {
    prefix |= (1u << idx);
    double cur = upper_rate_bound(model, prefix, r);
    rates[idx] = std::max(0.0, cur - prev);
    prev = cur;
  }
  return RateVector(rates);
}

// ---------------------------------------------------------------------------
// sum-rate minimization
// ---------------------------------------------------------------------------

namespace {

struct FeasibleSearch {
  const SourceModel& model;
  std::function<bool(const RateAllocation&)> is_feasible;
  std::function<double(const RateAllocation&)> objective;

  double best_value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_r = Eigen::VectorXd();

  void consider(const Eigen::VectorXd& r, double value) {
    if (value < best_value - 1e-15 ||
        (std::abs(value - best_value) <= 1e-15 && best_r.size() &&
         std::lexicographical_compare(r.data(), r.data() + r.size(),
                                      best_r.data(),
                                      best_r.data() + best_r.size()))) {
      best_value = value;
      best_r = r;
    }
  }
};

// Penalized objective: infeasible points are projected toward the anchor
// by bisection along the connecting ray and charged for the distance.
double evaluate_penalized(FeasibleSearch& fs, const Eigen::VectorXd& anchor,
                          bool have_anchor, const Eigen::VectorXd& x) {
  RateAllocation ra(x.cwiseMax(0.0));
  if (fs.is_feasible(ra)) {
    double v = fs.objective(ra);
    fs.consider(ra.r, v);
    return v;
  }
  if (!have_anchor) return 1e9;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 48; ++it) {
    double mid = 0.5 * (lo + hi);
    RateAllocation probe(((1.0 - mid) * x + mid * anchor).cwiseMax(0.0));
    if (fs.is_feasible(probe)) hi = mid;
    else                       lo = mid;
  }
  RateAllocation proj(((1.0 - hi) * x + hi * anchor).cwiseMax(0.0));
  double v = fs.objective(proj);
  fs.consider(proj.r, v);
  return v + hi * (10.0 + std::abs(v));
}

SumRateResult minimize_feasible(FeasibleSearch& fs,
                                const std::vector<Eigen::VectorXd>& extra,
                                int starts, std::uint64_t /*seed*/) {
  const int l = fs.model.l;
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(l);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(l, kRateCap);

  Eigen::VectorXd anchor = hi;
  bool have_anchor = fs.is_feasible(RateAllocation(anchor));
  if (have_anchor) fs.consider(anchor, fs.objective(RateAllocation(anchor)));

  // zero-rate shortcut
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(l);
  if (fs.is_feasible(RateAllocation(zero)))
    fs.consider(zero, fs.objective(RateAllocation(zero)));

  Objective f = [&](const Eigen::VectorXd& x) {
    return evaluate_penalized(fs, anchor, have_anchor, x);
  };

  std::vector<Eigen::VectorXd> start_points = extra;
  for (int j = 0; j < starts; ++j) {
    Eigen::VectorXd h = halton_point(j, l);
    Eigen::VectorXd p(l);
    if (j % 2 == 0) {
      p = h * kRateCap;  // linear coverage
    } else {
      // geometric coverage down to kRateCap * 1e-6
      for (int i = 0; i < l; ++i)
        p[i] = kRateCap * std::exp(std::log(1e-6) * (1.0 - h[i]));
    }
    start_points.push_back(p);
  }

  NelderMeadOptions nm;
  nm.max_iter = 5000;
  for (const auto& p : start_points)
    nelder_mead(f, p, 0.15, lo, hi, nm);

  // polish: push each coordinate down to its feasibility floor, accept on
  // improvement, then restart the simplex tightly around the best point
  for (int round = 0; round < 2; ++round) {
    if (!fs.best_r.size()) break;
    Eigen::VectorXd cur = fs.best_r;
    for (int i = 0; i < l; ++i) {
      double hi_i = cur[i], lo_i = 0.0;
      Eigen::VectorXd probe = cur;
      probe[i] = 0.0;
      if (fs.is_feasible(RateAllocation(probe))) {
        hi_i = 0.0;
      } else {
        for (int it = 0; it < 48; ++it) {
          double mid = 0.5 * (lo_i + hi_i);
          probe[i] = mid;
          if (fs.is_feasible(RateAllocation(probe))) hi_i = mid;
          else                                       lo_i = mid;
        }
      }
      probe[i] = hi_i;
      RateAllocation cand(probe);
      if (fs.is_feasible(cand)) {
        double v = fs.objective(cand);
        if (v < fs.best_value) fs.consider(cand.r, v);
      }
    }
    NelderMeadOptions fine;
    fine.max_iter = 3000;
    nelder_mead(f, fs.best_r, 0.01, lo, hi, fine);
    nelder_mead(f, fs.best_r, 1e-4, lo, hi, fine);
  }

  if (!fs.best_r.size())
    throw InfeasibleSpec("no feasible allocation found");
  return {fs.best_value, RateAllocation(fs.best_r)};
}

}  // namespace

SumRateResult sum_rate_inner(const SourceModel& model,
                             const DistortionSpec& spec) {
  check_subset_dim(model);
  require_nonvoid(model, spec);
  double logdet_sx = logdet_pd(model.sigma_x);
  FeasibleSearch fs{
      model,
      [&](const RateAllocation& r) { return feasible(model, spec, r); },
      [&](const RateAllocation& r) {
        Eigen::VectorXd u = scaled_noise_precisions(model, r);
        return r.r.sum() +
               0.5 * (logdet_pd(information_matrix(model, u)) + logdet_sx);
      }};
  return minimize_feasible(fs, {}, 16, 1);
}

SumRateResult sum_rate_outer(const SourceModel& model,
                             const SumDistortion& spec) {
  check_subset_dim(model);
  require_nonvoid(model, DistortionSpec(spec));
  double logdet_sx = logdet_pd(model.sigma_x);
  FeasibleSearch fs{
      model,
      [&](const RateAllocation& r) {
        return feasible(model, DistortionSpec(spec), r);
      },
      [&](const RateAllocation& r) {
        double w = waterfill_det(model, spec.gamma, spec.d, r);
        return std::max(0.0, r.r.sum() - 0.5 * std::log(w) + 0.5 * logdet_sx);
      }};
  // seed with the inner minimizer: the lower bound never exceeds the
  // inner objective there, which pins outer <= inner numerically
  std::vector<Eigen::VectorXd> extra;
  try {
    extra.push_back(sum_rate_inner(model, DistortionSpec(spec)).argmin.r);
  } catch (const Error&) {
  }
  return minimize_feasible(fs, extra, 16, 1);
}

// ---------------------------------------------------------------------------
// membership certificates
// ---------------------------------------------------------------------------

namespace {

// Cheap certified lower bound on the determinant budget for a spec at r.
double theta_lower_bound(const SourceModel& model, const DistortionSpec& spec,
                         const RateAllocation& r) {
  if (const auto* m = std::get_if<MatrixDistortion>(&spec))
    return m->sigma_d.determinant();
  if (const auto* s = std::get_if<SumDistortion>(&spec))
    return waterfill_det(model, s->gamma, s->d, r);
  const auto& v = std::get<VectorDistortion>(spec);
  Eigen::VectorXd u = scaled_noise_precisions(model, r);
  Eigen::MatrixXd t0 = v.gamma * inverse_pd(information_matrix(model, u)) *
                       v.gamma.transpose();
  Eigen::MatrixXd cand = 0.5 * (t0 + t0.transpose().eval());
  for (int i = 0; i < model.k; ++i)
    cand(i, i) = std::max(cand(i, i), v.d[i]);
  double g = v.gamma.determinant();
  return std::abs(cand.determinant()) / (g * g);
}

double max_violation(const SourceModel& model, const RateVector& rv,
                     const RateAllocation& r, std::optional<double> theta) {
  SubsetFunction f = subset_bounds(model, r, theta);
  double worst = -std::numeric_limits<double>::infinity();
  for (SubsetMask s = 1; s < (1u << model.l); ++s)
    worst = std::max(worst, f(s) - sum_rates_on(rv.rates, s));
  return worst;
}

}  // namespace

MembershipVerdict membership_verdict(const SourceModel& model,
                                     const RateVector& rv,
                                     const DistortionSpec& spec,
                                     const SearchConfig& search) {
  check_subset_dim(model);
  if (rv.size() != model.l)
    throw DimensionMismatch("rate vector length != l");
  validate_spec(spec, model.k);

  auto run = [&](bool inner) {
    FeasibleSearch fs{
        model,
        [&](const RateAllocation& r) { return feasible(model, spec, r); },
        [&](const RateAllocation& r) {
          if (inner) return max_violation(model, rv, r, std::nullopt);
          return max_violation(model, rv, r,
                               theta_lower_bound(model, spec, r));
        }};
    return minimize_feasible(fs, {}, search.starts, search.seed);
  };

  MembershipVerdict verdict;
  try {
    SumRateResult inner = run(true);
    if (inner.value <= search.cert_tol &&
        polyhedron_contains(model, rv, inner.argmin, std::nullopt)) {
      verdict.kind = MembershipVerdict::Kind::InnerCertified;
      verdict.witness = inner.argmin;
      return verdict;
    }
    SumRateResult outer = run(false);
    double theta = theta_lower_bound(model, spec, outer.argmin);
    if (outer.value <= search.cert_tol &&
        polyhedron_contains(model, rv, outer.argmin, theta)) {
      verdict.kind = MembershipVerdict::Kind::OuterCertified;
      verdict.witness = outer.argmin;
      verdict.theta = theta;
      return verdict;
    }
    if (outer.value > search.exclude_tol) {
      verdict.kind = MembershipVerdict::Kind::ExcludedHeuristic;
      verdict.margin = outer.value;
      return verdict;
    }
  } catch (const InfeasibleSpec&) {
    verdict.kind = MembershipVerdict::Kind::Undetermined;
    return verdict;
  }
  verdict.kind = MembershipVerdict::Kind::Undetermined;
  return verdict;
}

}  // namespace gaussrd
