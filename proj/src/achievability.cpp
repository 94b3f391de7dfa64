#include "gaussrd/achievability.hpp"

#include <cmath>

#include "gaussrd/rng.hpp"

namespace gaussrd {

namespace {

// Indices of active observations contained in mask.
std::vector<int> active_in(const TestChannel& tc, SubsetMask mask) {
  std::vector<int> idx;
  for (int i = 0; i < tc.model.l; ++i)
    if ((mask & (1u << i)) && tc.active[i]) idx.push_back(i);
  return idx;
}

// Covariance of U restricted to "rows" x "cols" index sets;
// cov(U_i, U_j) = (A Sigma_X A^T)_{ij} + delta_ij / u_i.
Eigen::MatrixXd u_covariance(const TestChannel& tc,
                             const std::vector<int>& idx,
                             const Eigen::VectorXd& u) {
  Eigen::MatrixXd obs = tc.model.a * tc.model.sigma_x * tc.model.a.transpose();
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd cov(m, m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      cov(p, q) = obs(idx[p], idx[q]) + (p == q ? 1.0 / u[idx[p]] : 0.0);
  return cov;
}

}  // namespace

TestChannel make_test_channel(const SourceModel& model,
                              const RateAllocation& r) {
  if (r.size() != model.l)
    throw DimensionMismatch("rate allocation length != l");
  TestChannel tc;
  tc.model = model;
  tc.r = r;
  tc.aux_precision.resize(model.l);
  tc.active.resize(model.l);
  for (int i = 0; i < model.l; ++i) {
    tc.aux_precision[i] = std::expm1(2.0 * r.r[i]) / model.noise_var[i];
    tc.active[i] = r.r[i] > 0.0;
  }
  Eigen::VectorXd u = scaled_noise_precisions(model, r);
  tc.estimator = inverse_pd(information_matrix(model, u)) *
                 model.a.transpose() * u.asDiagonal();
  return tc;
}

Eigen::MatrixXd test_channel_distortion(const SourceModel& model,
                                        const RateAllocation& r) {
  Eigen::VectorXd u = scaled_noise_precisions(model, r);
  return inverse_pd(information_matrix(model, u));
}

Eigen::MatrixXd test_channel_distortion_joint(const SourceModel& model,
                                              const RateAllocation& r) {
  TestChannel tc = make_test_channel(model, r);
  Eigen::VectorXd u = scaled_noise_precisions(model, r);
  std::vector<int> idx = active_in(tc, (1u << model.l) - 1);
  if (idx.empty()) return model.sigma_x;

  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd cross(model.k, m);  // cov(X, U_active) = Sigma_X A^T cols
  Eigen::MatrixXd full_cross = model.sigma_x * model.a.transpose();
  for (int p = 0; p < m; ++p) cross.col(p) = full_cross.col(idx[p]);

  Eigen::MatrixXd cov_u = u_covariance(tc, idx, u);
  Eigen::MatrixXd err =
      model.sigma_x - cross * inverse_pd(cov_u) * cross.transpose();
  return 0.5 * (err + err.transpose().eval());
}

double test_channel_mutual_info(const SourceModel& model, SubsetMask s,
                                const RateAllocation& r) {
  if (model.l > kMaxSubsetDim)
    throw DimensionMismatch("subset enumeration supports l <= 16");
  TestChannel tc = make_test_channel(model, r);
  Eigen::VectorXd u = scaled_noise_precisions(model, r);
  const SubsetMask full = (1u << model.l) - 1;
  std::vector<int> in_s = active_in(tc, s);
  if (in_s.empty()) return 0.0;  // constant channels carry nothing
  std::vector<int> rest = active_in(tc, full & ~s);

  // I(Y_S; U_S | U_rest) = h(U_S | U_rest) - h(V_S)
  std::vector<int> joint = rest;
  joint.insert(joint.end(), in_s.begin(), in_s.end());
  double h_cond = logdet_pd(u_covariance(tc, joint, u));
  if (!rest.empty()) h_cond -= logdet_pd(u_covariance(tc, rest, u));
  double h_noise = 0.0;
  for (int i : in_s) h_noise += -std::log(tc.aux_precision[i]);
  return 0.5 * std::max(0.0, h_cond - h_noise);
}

MonteCarloResult monte_carlo_distortion(const SourceModel& model,
                                        const RateAllocation& r,
                                        std::int64_t n, std::uint64_t seed) {
  if (n < 2) throw BadSampleCount("need at least 2 samples");
  TestChannel tc = make_test_channel(model, r);
  const int k = model.k, l = model.l;

  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma_x);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("sigma_x");
  Eigen::MatrixXd source_root = llt.matrixL();
  Eigen::VectorXd noise_sd = model.noise_var.cwiseSqrt();
  Eigen::VectorXd aux_sd(l);
  for (int i = 0; i < l; ++i)
    aux_sd[i] = tc.active[i] ? 1.0 / std::sqrt(tc.aux_precision[i]) : 0.0;

  CounterRng rng(seed);
  // chunked Kahan accumulation in fixed chunk order
  const std::int64_t chunk = 1 << 14;
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(k, k);

  Eigen::VectorXd z(k), x(k), obs(l), uvec(l), err(k);
  for (std::int64_t c0 = 0; c0 < n; c0 += chunk) {
    std::int64_t c1 = std::min(n, c0 + chunk);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
    for (std::int64_t t = c0; t < c1; ++t) {
      auto ut = static_cast<std::uint64_t>(t);
      for (int i = 0; i < k; ++i) z[i] = rng.normal(ut, i);
      x = source_root * z;
      obs = model.a * x;
      for (int i = 0; i < l; ++i) {
        if (!tc.active[i]) {
          uvec[i] = 0.0;
          continue;
        }
        double noise = noise_sd[i] * rng.normal(ut, k + i);
        double aux = aux_sd[i] * rng.normal(ut, k + l + i);
        uvec[i] = obs[i] + noise + aux;
      }
      err = x - tc.estimator * uvec;
      acc.noalias() += err * err.transpose();
    }
    Eigen::MatrixXd y = acc - comp;
    Eigen::MatrixXd s = total + y;
    comp = (s - total) - y;
    total = s;
  }

  MonteCarloResult out;
  out.empirical = total / static_cast<double>(n);
  Eigen::MatrixXd analytic = test_channel_distortion(model, r);
  out.std_error.resize(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      out.std_error(i, j) =
          std::sqrt((analytic(i, i) * analytic(j, j) +
                     analytic(i, j) * analytic(i, j)) /
                    static_cast<double>(n));
  return out;
}

}  // namespace gaussrd
