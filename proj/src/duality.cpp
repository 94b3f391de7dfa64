#include "gaussrd/duality.hpp"

#include <cmath>

namespace gaussrd {

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose().eval());
}

void check_gamma(const Eigen::MatrixXd& gamma, int l) {
  if (gamma.rows() != l || gamma.cols() != l)
    throw SpecDimensionMismatch("gamma must be l x l");
  double scale = 1.0 + gamma.cwiseAbs().maxCoeff();
  if (std::abs(gamma.determinant()) <= 1e-12 * std::pow(scale, l))
    throw SingularGamma("gamma");
}

// normalized diagonal: off-diagonals zero and sum gamma_i^{-2} = 1
bool is_normalized_diagonal(const Eigen::MatrixXd& gamma) {
  const int l = static_cast<int>(gamma.rows());
  double tol = 1e-9 * (1.0 + gamma.cwiseAbs().maxCoeff());
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      if (i != j && std::abs(gamma(i, j)) > tol) return false;
  double s = 0.0;
  for (int i = 0; i < l; ++i) {
    if (gamma(i, i) == 0.0) return false;
    s += 1.0 / (gamma(i, i) * gamma(i, i));
  }
  return std::abs(s - 1.0) <= 1e-9;
}

Eigen::VectorXd aux_precisions(const DirectModel& dm,
                               const RateAllocation& r) {
  if (r.size() != dm.l)
    throw DimensionMismatch("rate allocation length != l");
  Eigen::VectorXd v(dm.l);
  for (int i = 0; i < dm.l; ++i)
    v[i] = std::expm1(2.0 * r.r[i]) / dm.noise_var[i];
  return v;
}

}  // namespace

DirectModel validate_direct_model(DirectModel raw) {
  if (raw.l <= 0) throw DimensionMismatch("l must be positive");
  if (raw.sigma_x.rows() != raw.l || raw.sigma_x.cols() != raw.l)
    throw DimensionMismatch("sigma_x must be l x l");
  if (raw.noise_var.size() != raw.l)
    throw DimensionMismatch("noise_var must have length l");
  // reuse the remote-model validation for symmetry/PD/noise checks
  SourceModel probe;
  probe.k = probe.l = raw.l;
  probe.sigma_x = raw.sigma_x;
  probe.a = Eigen::MatrixXd::Identity(raw.l, raw.l);
  probe.noise_var = raw.noise_var;
  validate_model(probe);
  return raw;
}

DualityMatrices duality_matrices(const DirectModel& dm,
                                 const Eigen::MatrixXd& gamma) {
  check_gamma(gamma, dm.l);
  Eigen::MatrixXd sx_inv = inverse_pd(dm.sigma_x);
  Eigen::MatrixXd sn = dm.noise_var.asDiagonal();
  Eigen::MatrixXd sn_inv = dm.noise_var.cwiseInverse().asDiagonal();

  DualityMatrices out;
  Eigen::MatrixXd residual_cov = inverse_pd(sx_inv + sn_inv);
  out.a_tilde = residual_cov * sn_inv;
  out.b = symmetrize(sn + sn * sx_inv * sn);

  // cross-check the second expression for b
  Eigen::MatrixXd a_inv = out.a_tilde.inverse();
  Eigen::MatrixXd b2 = symmetrize(a_inv * residual_cov * a_inv.transpose());
  double scale = 1.0 + out.b.cwiseAbs().maxCoeff();
  if ((out.b - b2).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw Error("duality matrices: the two expressions for b disagree");

  out.b_diag = out.b.diagonal();
  out.b_tilde = symmetrize(gamma * out.b * gamma.transpose());
  out.b_tilde_diag = out.b_tilde.diagonal();
  return out;
}

ConvertedProblem convert_spec(const DirectModel& dm,
                              const Eigen::MatrixXd& gamma,
                              const DistortionSpec& spec) {
  validate_spec(spec, dm.l);
  DualityMatrices dual = duality_matrices(dm, gamma);

  ConvertedProblem out;
  out.model.k = out.model.l = dm.l;
  out.model.sigma_x = dm.sigma_x;
  out.model.a = Eigen::MatrixXd::Identity(dm.l, dm.l);
  out.model.noise_var = dm.noise_var;
  out.model = validate_model(out.model);

  Eigen::MatrixXd a_inv = dual.a_tilde.inverse();
  if (const auto* m = std::get_if<MatrixDistortion>(&spec)) {
    out.spec = MatrixDistortion{symmetrize(
        dual.a_tilde * (m->sigma_d + dual.b) * dual.a_tilde.transpose())};
  } else if (const auto* v = std::get_if<VectorDistortion>(&spec)) {
    // b_tilde for the spec's own gamma
    Eigen::MatrixXd bt = symmetrize(v->gamma * dual.b * v->gamma.transpose());
    out.spec = VectorDistortion{v->gamma * a_inv,
                                v->d + bt.diagonal()};
  } else {
    const auto& s = std::get<SumDistortion>(spec);
    Eigen::MatrixXd bt = symmetrize(s.gamma * dual.b * s.gamma.transpose());
    out.spec = SumDistortion{s.gamma * a_inv, s.d + bt.trace()};
  }
  return out;
}

double direct_rate_bound(const DirectModel& dm, SubsetMask s,
                         const RateAllocation& r,
                         std::optional<double> theta) {
  if (dm.l > kMaxSubsetDim)
    throw DimensionMismatch("subset enumeration supports l <= 16");
  if (s == 0) throw EmptySubset("direct_rate_bound");
  if (theta && !(*theta > 0.0)) throw NonpositiveTheta(std::to_string(*theta));

  Eigen::MatrixXd sy = dm.sigma_y();
  Eigen::MatrixXd sy_inv = inverse_pd(sy);
  Eigen::VectorXd v = aux_precisions(dm, r);
  Eigen::VectorXd v_rest = v;
  for (int i = 0; i < dm.l; ++i)
    if (s & (1u << i)) v_rest[i] = 0.0;

  auto with_diag = [&](const Eigen::VectorXd& diag) {
    Eigen::MatrixXd m = sy_inv;
    m.diagonal() += diag;
    return m;
  };

  DualityMatrices dual =
      duality_matrices(dm, Eigen::MatrixXd::Identity(dm.l, dm.l));
  double native;
  if (theta) {
    double val = logdet_pd(sy + dual.b) + 2.0 * r.r.sum() - std::log(*theta) -
                 logdet_pd(sy) - logdet_pd(with_diag(v_rest));
    native = 0.5 * std::max(0.0, val);
  } else {
    double val = logdet_pd(with_diag(v)) - logdet_pd(with_diag(v_rest));
    native = 0.5 * std::max(0.0, val);
  }

  // the same quantity through the remote problem; the two routes must agree
  SourceModel remote_model;
  remote_model.k = remote_model.l = dm.l;
  remote_model.sigma_x = dm.sigma_x;
  remote_model.a = Eigen::MatrixXd::Identity(dm.l, dm.l);
  remote_model.noise_var = dm.noise_var;
  double remote;
  if (theta) {
    double det_a = dual.a_tilde.determinant();
    remote = lower_rate_bound(remote_model, s, det_a * det_a * (*theta), r);
  } else {
    remote = upper_rate_bound(remote_model, s, r);
  }
  if (std::abs(native - remote) > 1e-9 * (1.0 + std::abs(native)))
    throw Error("direct_rate_bound: native and converted routes disagree");
  return native;
}

DirectMatchReport sufficient_matching_direct(const DirectModel& dm,
                                             const Eigen::MatrixXd& gamma,
                                             double d) {
  DualityMatrices dual = duality_matrices(dm, gamma);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dual.b_tilde,
                                                    Eigen::EigenvaluesOnly);
  DirectMatchReport report;
  report.mu_min_star = es.eigenvalues().minCoeff();
  report.trace_b_tilde = dual.b_tilde.trace();
  report.threshold = (dm.l + 1) * report.mu_min_star - report.trace_b_tilde;
  report.verdict = (d > 0.0 && d <= report.threshold)
                       ? DirectMatchReport::Verdict::Matched
                       : DirectMatchReport::Verdict::Unknown;

  if (is_normalized_diagonal(gamma)) {
    // the split exists when noise_var is proportional to gamma^{-2}
    Eigen::VectorXd implied(dm.l);
    for (int i = 0; i < dm.l; ++i)
      implied[i] = dm.noise_var[i] * gamma(i, i) * gamma(i, i);
    double delta = implied.mean();
    if ((implied.array() - delta).abs().maxCoeff() <=
        1e-9 * (1.0 + delta)) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(dm.sigma_x,
                                                        Eigen::EigenvaluesOnly);
      double lambda_min = ex.eigenvalues().minCoeff();
      DirectMatchReport::NoiseSplit split;
      split.delta = delta;
      split.bound_at_delta = delta - delta * delta / lambda_min;
      split.optimal_delta = 0.5 * lambda_min;
      split.optimal_bound = 0.25 * lambda_min;
      report.split = split;
    }
  }
  return report;
}

DirectModel noise_split_model(const Eigen::MatrixXd& sigma_y,
                              const Eigen::MatrixXd& gamma, double delta) {
  const int l = static_cast<int>(sigma_y.rows());
  check_gamma(gamma, l);
  if (!is_normalized_diagonal(gamma))
    throw SpecDimensionMismatch(
        "noise split requires a normalized diagonal gamma");
  if (!(delta > 0.0)) throw SpecDimensionMismatch("delta must be positive");

  DirectModel dm;
  dm.l = l;
  dm.noise_var.resize(l);
  for (int i = 0; i < l; ++i)
    dm.noise_var[i] = delta / (gamma(i, i) * gamma(i, i));
  dm.sigma_x = sigma_y;
  dm.sigma_x.diagonal() -= dm.noise_var;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      symmetrize(dm.sigma_x), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= psd_tolerance(dm.sigma_x))
    throw HiddenSourceNotPD("sigma_y - delta gamma^{-2} is not PD");
  return validate_direct_model(dm);
}

}  // namespace gaussrd
