#include "gaussrd/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gaussrd/rng.hpp"

namespace gaussrd {

namespace {

Eigen::MatrixXd gamma_inverse(const Eigen::MatrixXd& gamma) {
  double scale = 1.0 + gamma.cwiseAbs().maxCoeff();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gamma);
  if (!lu.isInvertible() ||
      std::abs(lu.determinant()) <=
          1e-12 * std::pow(scale, gamma.rows()))
    throw SingularGamma("gamma");
  return lu.inverse();
}

double abs_det(const Eigen::MatrixXd& m) {
  return std::abs(m.determinant());
}

// gamma G(u)^{-1} gamma^T: the distortion-coordinate posterior.
Eigen::MatrixXd budget_matrix(const SourceModel& model,
                              const Eigen::MatrixXd& gamma,
                              const RateAllocation& r) {
  Eigen::VectorXd u = scaled_noise_precisions(model, r);
  Eigen::MatrixXd m =
      gamma * inverse_pd(information_matrix(model, u)) * gamma.transpose();
  return 0.5 * (m + m.transpose().eval());
}

}  // namespace

Eigen::VectorXd information_spectrum_u(const SourceModel& model,
                                       const Eigen::MatrixXd& gamma,
                                       const Eigen::VectorXd& u) {
  if (gamma.rows() != model.k || gamma.cols() != model.k)
    throw SpecDimensionMismatch("gamma must be k x k");
  Eigen::MatrixXd gi = gamma_inverse(gamma);
  Eigen::MatrixXd m = gi.transpose() * information_matrix(model, u) * gi;
  m = 0.5 * (m + m.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Eigen::VectorXd information_spectrum(const SourceModel& model,
                                     const Eigen::MatrixXd& gamma,
                                     const RateAllocation& r) {
  return information_spectrum_u(model, gamma,
                                scaled_noise_precisions(model, r));
}

WaterSolution water_level(const Eigen::VectorXd& alphas, double d) {
  const int k = static_cast<int>(alphas.size());
  if (k == 0) throw DimensionMismatch("empty spectrum");
  if (alphas.minCoeff() <= 0.0)
    throw NotPositiveDefinite("spectrum must be positive");
  Eigen::VectorXd inv = alphas.cwiseInverse();
  double base = inv.sum();
  // strictly wider than the slack of the feasibility checks: allocations
  // admitted there must be admitted here too, even on the boundary
  double tol = 1e-8 * (1.0 + std::abs(base));
  if (d < base - tol)
    throw InsufficientBudget("budget " + std::to_string(d) +
                             " below floor " + std::to_string(base));

  WaterSolution sol;
  if (d <= base + tol) {
    sol.xi = 0.0;
    sol.levels = inv;
    sol.omega = inv.prod();
    return sol;
  }
  double lo = 0.0, hi = d;
  for (int it = 0; it < 200 && (hi - lo) > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    double s = inv.cwiseMax(mid).sum();
    if (s > d) hi = mid;
    else       lo = mid;
  }
  sol.xi = 0.5 * (lo + hi);
  sol.levels = inv.cwiseMax(sol.xi);
  sol.omega = sol.levels.prod();
  return sol;
}

double waterfill_det(const SourceModel& model, const Eigen::MatrixXd& gamma,
                     double d, const RateAllocation& r) {
  Eigen::VectorXd alphas = information_spectrum(model, gamma, r);
  try {
    WaterSolution sol = water_level(alphas, d);
    double g2 = gamma.determinant();
    return sol.omega / (g2 * g2);
  } catch (const InsufficientBudget&) {
    throw InfeasibleAllocation("rate allocation outside the budget set");
  }
}

double max_det_search(const SourceModel& model, const DistortionSpec& spec,
                      const RateAllocation& r, int samples,
                      std::uint64_t seed) {
  const Eigen::MatrixXd* gamma = nullptr;
  bool is_sum = false;
  double budget = 0.0;
  Eigen::VectorXd caps;
  if (const auto* s = std::get_if<SumDistortion>(&spec)) {
    gamma = &s->gamma;
    is_sum = true;
    budget = s->d;
  } else if (const auto* v = std::get_if<VectorDistortion>(&spec)) {
    gamma = &v->gamma;
    caps = v->d;
  } else {
    throw SpecDimensionMismatch("max_det_search takes a Sum or Vector spec");
  }
  validate_spec(spec, model.k);

  const int k = model.k;
  Eigen::MatrixXd t0 = budget_matrix(model, *gamma, r);
  double gdet2 = gamma->determinant();
  gdet2 *= gdet2;

  double tol = psd_tolerance(t0);
  double best;
  if (is_sum) {
    if (t0.trace() > budget + tol)
      throw InfeasibleAllocation("budget below achievable trace");
    // water-filling candidate in the eigenbasis of t0
    best = waterfill_det(model, *gamma, budget, r);
  } else {
    for (int i = 0; i < k; ++i)
      if (t0(i, i) > caps[i] + tol)
        throw InfeasibleAllocation("cap " + std::to_string(i) +
                                   " below forced minimum");
    Eigen::MatrixXd cand = t0;
    for (int i = 0; i < k; ++i)
      cand(i, i) = std::max(t0(i, i), caps[i]);
    best = abs_det(cand) / gdet2;
  }

  CounterRng rng(seed);
  Eigen::MatrixXd w(k, k), pert(k, k), cand(k, k);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        w(i, j) = rng.normal(static_cast<std::uint64_t>(s),
                             static_cast<std::uint64_t>(i * k + j));
    pert = w * w.transpose();
    double c;
    if (is_sum) {
      double room = budget - t0.trace();
      double tp = pert.trace();
      if (tp <= 0.0 || room <= 0.0) continue;
      c = room / tp;
    } else {
      c = std::numeric_limits<double>::infinity();
      for (int i = 0; i < k; ++i) {
        if (pert(i, i) <= 0.0) continue;
        c = std::min(c, (caps[i] - t0(i, i)) / pert(i, i));
      }
      if (!std::isfinite(c) || c <= 0.0) continue;
    }
    cand = t0 + c * pert;
    best = std::max(best, abs_det(cand) / gdet2);
  }
  return best;
}

namespace {

double logdet_or_neg_inf(const Eigen::MatrixXd& t) {
  Eigen::LLT<Eigen::MatrixXd> llt(t);
  if (llt.info() != Eigen::Success)
    return -std::numeric_limits<double>::infinity();
  return 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
}

}  // namespace

double max_det_vector(const SourceModel& model, const Eigen::MatrixXd& gamma,
                      const Eigen::VectorXd& d, const RateAllocation& r) {
  const int k = model.k;
  if (d.size() != k) throw SpecDimensionMismatch("cap vector must have length k");
  Eigen::MatrixXd t0 = budget_matrix(model, gamma, r);
  double tol = psd_tolerance(t0);
  Eigen::VectorXd slack(k);
  for (int i = 0; i < k; ++i) {
    slack[i] = d[i] - t0(i, i);
    if (slack[i] < -tol)
      throw InfeasibleAllocation("cap " + std::to_string(i) +
                                 " below forced minimum");
    slack[i] = std::max(slack[i], 0.0);
  }
  double gdet2 = gamma.determinant();
  gdet2 *= gdet2;

  const int restarts = 8, sweeps = 200;
  CounterRng rng(0x77a7e2f1u);
  double best_logdet = -std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < restarts; ++restart) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    if (restart == 0) {
      // start at the diagonal slack candidate
      for (int i = 0; i < k; ++i) m(i, i) = std::sqrt(slack[i]);
    } else {
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j <= i; ++j)
          m(i, j) = rng.normal(static_cast<std::uint64_t>(restart),
                               static_cast<std::uint64_t>(i * k + j));
        double row2 = m.row(i).squaredNorm();
        if (row2 > 0.0)
          m.row(i) *= std::sqrt(0.9 * slack[i] / row2);
      }
    }

    auto eval = [&](const Eigen::MatrixXd& mm) {
      return logdet_or_neg_inf(t0 + mm * mm.transpose());
    };
    double cur = eval(m);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      bool improved = false;
      for (int p = 0; p < k; ++p) {
        for (int q = 0; q <= p; ++q) {
          double others = m.row(p).squaredNorm() - m(p, q) * m(p, q);
          double room = slack[p] - others;
          if (room <= 0.0) continue;
          double b = std::sqrt(room);
          double saved = m(p, q);
          double pick = saved, pick_val = cur;
          for (double t : {-b, -0.5 * b, 0.0, 0.5 * b, b}) {
            m(p, q) = t;
            double v = eval(m);
            if (v > pick_val + 1e-14) { pick_val = v; pick = t; }
          }
          m(p, q) = pick;
          if (pick != saved) { cur = pick_val; improved = true; }
        }
      }
      if (!improved) break;
    }
    best_logdet = std::max(best_logdet, cur);
  }
  return std::exp(best_logdet) / gdet2;
}

}  // namespace gaussrd
