#include "gaussrd/model.hpp"

#include <cmath>
#include <string>

namespace gaussrd {

double psd_tolerance(const Eigen::MatrixXd& m) {
  double peak = m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0;
  return 1e-9 * (1.0 + peak);
}

RateAllocation::RateAllocation(Eigen::VectorXd rates) : r(std::move(rates)) {
  for (int i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i]) || r[i] < 0.0)
      throw NegativeRate("rate " + std::to_string(i) + " = " +
                         std::to_string(r[i]));
  }
}

namespace {

void require_symmetric(const Eigen::MatrixXd& m, const std::string& name) {
  if (m.rows() != m.cols())
    throw DimensionMismatch(name + " is not square");
  double tol = psd_tolerance(m);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol)
    throw NonSymmetric(name);
}

void require_pd(const Eigen::MatrixXd& m, const std::string& name) {
  require_symmetric(m, name);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.eigenvalues().minCoeff() <= psd_tolerance(m))
    throw NotPositiveDefinite(name);
}

}  // namespace

SourceModel validate_model(SourceModel raw) {
  if (raw.k <= 0 || raw.l <= 0)
    throw DimensionMismatch("k and l must be positive");
  if (raw.sigma_x.rows() != raw.k || raw.sigma_x.cols() != raw.k)
    throw DimensionMismatch("sigma_x must be k x k");
  if (raw.a.rows() != raw.l || raw.a.cols() != raw.k)
    throw DimensionMismatch("a must be l x k");
  if (raw.noise_var.size() != raw.l)
    throw DimensionMismatch("noise_var must have length l");
  require_pd(raw.sigma_x, "sigma_x");
  for (int i = 0; i < raw.l; ++i) {
    if (!(raw.noise_var[i] > 0.0))
      throw NonpositiveNoise("noise_var[" + std::to_string(i) + "]");
  }
  return raw;
}

void validate_spec(const DistortionSpec& spec, int k) {
  auto check_gamma = [k](const Eigen::MatrixXd& gamma) {
    if (gamma.rows() != k || gamma.cols() != k)
      throw SpecDimensionMismatch("gamma must be k x k");
    double scale = 1.0 + gamma.cwiseAbs().maxCoeff();
    if (std::abs(gamma.determinant()) <= 1e-12 * std::pow(scale, k))
      throw SingularGamma("gamma");
  };
  if (const auto* m = std::get_if<MatrixDistortion>(&spec)) {
    if (m->sigma_d.rows() != k || m->sigma_d.cols() != k)
      throw SpecDimensionMismatch("sigma_d must be k x k");
    require_pd(m->sigma_d, "sigma_d");
  } else if (const auto* v = std::get_if<VectorDistortion>(&spec)) {
    check_gamma(v->gamma);
    if (v->d.size() != k)
      throw SpecDimensionMismatch("distortion vector must have length k");
    if (v->d.minCoeff() <= 0.0)
      throw SpecDimensionMismatch("distortion levels must be positive");
  } else {
    const auto& s = std::get<SumDistortion>(spec);
    check_gamma(s.gamma);
    if (s.d <= 0.0)
      throw SpecDimensionMismatch("distortion level must be positive");
  }
}

Eigen::MatrixXd conditional_covariance(const SourceModel& model) {
  Eigen::VectorXd full = model.noise_var.cwiseInverse();
  return inverse_pd(information_matrix(model, full));
}

Eigen::VectorXd scaled_noise_precisions(const SourceModel& model,
                                        const RateAllocation& r) {
  if (r.size() != model.l)
    throw DimensionMismatch("rate allocation length != l");
  Eigen::VectorXd u(model.l);
  for (int i = 0; i < model.l; ++i)
    u[i] = -std::expm1(-2.0 * r.r[i]) / model.noise_var[i];
  return u;
}

bool psd_leq(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2, double tol) {
  if (m1.rows() != m2.rows() || m1.cols() != m2.cols() ||
      m1.rows() != m1.cols())
    throw DimensionMismatch("psd_leq requires equal square matrices");
  Eigen::MatrixXd diff = m2 - m1;
  diff = 0.5 * (diff + diff.transpose().eval());
  if (tol < 0.0) tol = psd_tolerance(diff);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

Eigen::MatrixXd information_matrix(const SourceModel& model,
                                   const Eigen::VectorXd& u) {
  Eigen::MatrixXd g = inverse_pd(model.sigma_x);
  g += model.a.transpose() * u.asDiagonal() * model.a;
  return 0.5 * (g + g.transpose().eval());
}

double logdet_pd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("logdet_pd");
  return 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
}

Eigen::MatrixXd inverse_pd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("inverse_pd");
  Eigen::MatrixXd inv =
      llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose().eval());
}

}  // namespace gaussrd
