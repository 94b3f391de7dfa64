#include "gaussrd/matching.hpp"

#include <cmath>
#include <vector>

#include "gaussrd/rng.hpp"
#include "gaussrd/waterfill.hpp"

namespace gaussrd {

namespace {

Eigen::MatrixXd gamma_inverse_checked(const Eigen::MatrixXd& gamma, int k) {
  if (gamma.rows() != k || gamma.cols() != k)
    throw SpecDimensionMismatch("gamma must be k x k");
  double scale = 1.0 + gamma.cwiseAbs().maxCoeff();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gamma);
  if (!lu.isInvertible() ||
      std::abs(lu.determinant()) <= 1e-12 * std::pow(scale, k))
    throw SingularGamma("gamma");
  return lu.inverse();
}

// Unitary Q whose first column is the normalized direction of row,
// built from a Householder reflector with the cancellation-free sign.
Eigen::MatrixXd householder_frame(const Eigen::VectorXd& row) {
  const int k = static_cast<int>(row.size());
  double n = row.norm();
  double s = row[0] >= 0.0 ? 1.0 : -1.0;
  Eigen::VectorXd v = row;
  v[0] += s * n;
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(k, k);
  double vv = v.squaredNorm();
  if (vv > 0.0) q -= (2.0 / vv) * (v * v.transpose());
  // reflector sends row to -s * n * e1; flip the first column for +n
  q.col(0) *= -s;
  return q;
}

}  // namespace

double max_information_eigenvalue(const SourceModel& model,
                                  const Eigen::MatrixXd& gamma) {
  Eigen::VectorXd full = model.noise_var.cwiseInverse();
  Eigen::VectorXd alphas = information_spectrum_u(model, gamma, full);
  return alphas.maxCoeff();
}

DirectionTerms direction_terms(const SourceModel& model,
                               const Eigen::MatrixXd& gamma, int i,
                               const Eigen::VectorXd& u) {
  if (i < 0 || i >= model.l) throw DimensionMismatch("observation index");
  if (u.size() != model.l) throw DimensionMismatch("u must have length l");
  Eigen::MatrixXd gi = gamma_inverse_checked(gamma, model.k);
  Eigen::MatrixXd ahat = model.a * gi;  // rows are the mapped directions
  Eigen::VectorXd dir = ahat.row(i).transpose();
  double n2 = dir.squaredNorm();
  if (n2 <= 1e-24)
    throw ZeroObservationRow("observation " + std::to_string(i));

  Eigen::MatrixXd q = householder_frame(dir);
  Eigen::MatrixXd core =
      q.transpose() * gi.transpose() * inverse_pd(model.sigma_x) * gi * q;
  double eta = core(0, 0);
  for (int j = 0; j < model.l; ++j) {
    if (j == i) continue;
    double first = ahat.row(j) * q.col(0);
    eta += u[j] * first * first;
  }
  return {eta, n2 / model.noise_var[i] + eta};
}

bool spread_condition_holds(const SourceModel& model,
                            const Eigen::MatrixXd& gamma,
                            const Eigen::VectorXd& u) {
  Eigen::VectorXd alphas = information_spectrum_u(model, gamma, u);
  double lhs = 1.0 / alphas.minCoeff() - 1.0 / alphas.maxCoeff();
  for (int i = 0; i < model.l; ++i) {
    DirectionTerms t = direction_terms(model, gamma, i, u);
    if (lhs > 1.0 / t.chi + 1e-12 * (1.0 + lhs)) return false;
  }
  return true;
}

MdScanResult monotone_decrease_scan(const SourceModel& model,
                                    const Eigen::MatrixXd& gamma, double d,
                                    const GridConfig& grid) {
  const int l = model.l;
  gamma_inverse_checked(gamma, model.k);
  {
    Eigen::MatrixXd cond = conditional_covariance(model);
    double lower = (gamma * cond * gamma.transpose()).trace();
    if (d <= lower + 1e-12 * (1.0 + lower))
      throw InfeasibleSpec("distortion at or below the trace bound");
  }

  Eigen::VectorXd u_max = model.noise_var.cwiseInverse();
  auto in_budget = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd alphas = information_spectrum_u(model, gamma, u);
    return alphas.cwiseInverse().sum() <= d;
  };
  auto to_rates = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd r(l);
    for (int i = 0; i < l; ++i)
      r[i] = -0.5 * std::log1p(-u[i] * model.noise_var[i]);
    return r;
  };
  auto decay_det = [&](const Eigen::VectorXd& r, int axis) {
    RateAllocation ra(r);
    return std::exp(-2.0 * r[axis]) * waterfill_det(model, gamma, d, ra);
  };

  MdScanResult result;
  auto probe = [&](const Eigen::VectorXd& u) {
    if (!result.holds || !in_budget(u)) return;
    Eigen::VectorXd r = to_rates(u);
    for (int axis = 0; axis < l && result.holds; ++axis) {
      double g0 = decay_det(r, axis);
      Eigen::VectorXd r2 = r;
      r2[axis] += grid.fd_step;
      double g1 = decay_det(r2, axis);
      if (g1 - g0 > grid.tol * (1.0 + std::abs(g0))) {
        result.holds = false;
        result.violation_r = r;
        result.violation_axis = axis;
      }
    }
  };

  // geometric per-axis levels
  std::vector<std::vector<double>> levels(l);
  for (int i = 0; i < l; ++i) {
    levels[i].reserve(grid.axis_points);
    double lo = u_max[i] * 1e-6, hi = u_max[i] * (1.0 - 1e-9);
    for (int j = 0; j < grid.axis_points; ++j) {
      double t = grid.axis_points == 1
                     ? 1.0
                     : static_cast<double>(j) / (grid.axis_points - 1);
      levels[i].push_back(lo * std::pow(hi / lo, t));
    }
  }

  double combos = std::pow(static_cast<double>(grid.axis_points), l);
  if (combos <= 4096.0) {
    Eigen::VectorXi idx = Eigen::VectorXi::Zero(l);
    Eigen::VectorXd u(l);
    bool done = false;
    while (!done && result.holds) {
      for (int i = 0; i < l; ++i) u[i] = levels[i][idx[i]];
      probe(u);
      int c = 0;
      while (c < l && ++idx[c] == grid.axis_points) idx[c++] = 0;
      done = (c == l);
    }
  } else {
    // axis sweeps with the other coordinates held at mid saturation
    for (int i = 0; i < l && result.holds; ++i) {
      Eigen::VectorXd u = 0.5 * u_max;
      for (double lvl : levels[i]) {
        u[i] = lvl;
        probe(u);
        if (!result.holds) break;
      }
    }
  }

  CounterRng rng(grid.seed);
  for (int s = 0; s < grid.random_points && result.holds; ++s) {
    Eigen::VectorXd u(l);
    for (int i = 0; i < l; ++i) {
      double t = rng.uniform(static_cast<std::uint64_t>(s),
                             static_cast<std::uint64_t>(i));
      u[i] = u_max[i] * (1.0 - 1e-9) * t * t;
    }
    probe(u);
  }
  return result;
}

MatchReport sufficient_matching(const SourceModel& model,
                                const Eigen::MatrixXd& gamma, double d) {
  MatchReport report;
  Eigen::MatrixXd cond = conditional_covariance(model);
  report.feasible_lower = (gamma * cond * gamma.transpose()).trace();
  report.threshold = (model.k + 1) / max_information_eigenvalue(model, gamma);
  if (d <= report.feasible_lower + 1e-12 * (1.0 + report.feasible_lower))
    report.verdict = MatchReport::Verdict::Infeasible;
  else if (d <= report.threshold)
    report.verdict = MatchReport::Verdict::Matched;
  else
    report.verdict = MatchReport::Verdict::Unknown;
  return report;
}

}  // namespace gaussrd
