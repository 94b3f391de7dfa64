#ifndef GAUSSRD_ACHIEVABILITY_HPP
#define GAUSSRD_ACHIEVABILITY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gaussrd/model.hpp"
#include "gaussrd/rate_region.hpp"

namespace gaussrd {

// Forward construction: auxiliary Gaussians U_i = Y_i + V_i with
// var(V_i) = noise_var[i] / (e^{2 r_i} - 1), estimated by the linear MMSE
// map. Channels with r_i = 0 are degenerate: U_i is the constant zero and
// the corresponding estimator column vanishes.
struct TestChannel {
  SourceModel model;
  RateAllocation r;
  Eigen::VectorXd aux_precision;  // (e^{2 r_i} - 1) / noise_var[i]
  std::vector<bool> active;       // r_i > 0
  Eigen::MatrixXd estimator;      // K x L MMSE map applied to U
};

TestChannel make_test_channel(const SourceModel& model,
                              const RateAllocation& r);

// Analytic MMSE error covariance of the construction: G(u)^{-1}.
Eigen::MatrixXd test_channel_distortion(const SourceModel& model,
                                        const RateAllocation& r);

// The same error covariance computed independently through the joint
// (X, U) Gaussian covariance and its Schur complement.
Eigen::MatrixXd test_channel_distortion_joint(const SourceModel& model,
                                              const RateAllocation& r);

// I(Y_S; U_S | U_{S^c}) from log-det entropies of the explicit joint
// covariance; equals upper_rate_bound on the same subset. S may be empty.
double test_channel_mutual_info(const SourceModel& model, SubsetMask s,
                                const RateAllocation& r);

struct MonteCarloResult {
  Eigen::MatrixXd empirical;   // K x K sampled error covariance
  Eigen::MatrixXd std_error;   // per-entry standard error scale
};

// Draws n i.i.d. samples of (X, N, V), forms U and the MMSE estimate, and
// returns the empirical error covariance. Counter-based RNG keyed by
// (seed, sample index): the result is independent of chunking.
MonteCarloResult monte_carlo_distortion(const SourceModel& model,
                                        const RateAllocation& r,
                                        std::int64_t n, std::uint64_t seed);

}  // namespace gaussrd

#endif  // GAUSSRD_ACHIEVABILITY_HPP
