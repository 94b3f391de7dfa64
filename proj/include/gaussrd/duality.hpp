#ifndef GAUSSRD_DUALITY_HPP
#define GAUSSRD_DUALITY_HPP

#include <Eigen/Dense>
#include <optional>

#include "gaussrd/model.hpp"
#include "gaussrd/rate_region.hpp"

namespace gaussrd {

// Multiterminal (direct) problem instance: the decoder reconstructs the
// observations Y = X + N themselves. Noise is restricted to a diagonal
// covariance, matching the independent-noise construction.
struct DirectModel {
  int l = 0;
  Eigen::MatrixXd sigma_x;    // L x L hidden-source covariance, PD
  Eigen::VectorXd noise_var;  // L positive noise variances

  Eigen::MatrixXd sigma_y() const {
    Eigen::MatrixXd y = sigma_x;
    y.diagonal() += noise_var;
    return y;
  }
};

DirectModel validate_direct_model(DirectModel raw);

// The change of variables X = a_tilde Y + residual that carries every
// direct-problem quantity onto the remote problem:
//   a_tilde = (sigma_x^{-1} + sigma_n^{-1})^{-1} sigma_n^{-1}
//   b       = sigma_n + sigma_n sigma_x^{-1} sigma_n
//           = a_tilde^{-1} residual_cov a_tilde^{-T}   (cross-checked)
//   b_tilde = gamma b gamma^T
struct DualityMatrices {
  Eigen::MatrixXd a_tilde;
  Eigen::MatrixXd b;
  Eigen::VectorXd b_diag;
  Eigen::MatrixXd b_tilde;
  Eigen::VectorXd b_tilde_diag;
};
DualityMatrices duality_matrices(const DirectModel& dm,
                                 const Eigen::MatrixXd& gamma);

// Equivalent remote problem: identity observation map, the hidden source
// as the remote source, and the criterion mapped by
//   Matrix  sigma_d          -> a_tilde (sigma_d + b) a_tilde^T
//   Vector (gamma, d)        -> (gamma a_tilde^{-1}, d + diag(b_tilde))
//   Sum    (gamma, d)        -> (gamma a_tilde^{-1}, d + tr(b_tilde))
struct ConvertedProblem {
  SourceModel model;
  DistortionSpec spec;
};
ConvertedProblem convert_spec(const DirectModel& dm,
                              const Eigen::MatrixXd& gamma,
                              const DistortionSpec& spec);

// Direct-problem per-subset rate bound computed natively from sigma_y and
// the auxiliary-noise precisions (e^{2 r_i} - 1)/noise_var[i]. With theta
// (= |sigma_d + b|) the lower variant, with nullopt the upper variant.
// Cross-validated against the converted remote model on every call.
double direct_rate_bound(const DirectModel& dm, SubsetMask s,
                         const RateAllocation& r,
                         std::optional<double> theta);

// Sufficient tightness test for the direct problem under the sum
// criterion, plus the noise-splitting shortcut available when gamma is a
// normalized diagonal (sum of gamma_i^{-2} equal to 1) and the model's
// noise is proportional to gamma^{-2}.
struct DirectMatchReport {
  enum class Verdict { Matched, Unknown };
  double mu_min_star = 0.0;    // min eigenvalue of b_tilde
  double trace_b_tilde = 0.0;
  double threshold = 0.0;      // (L+1) mu_min_star - tr(b_tilde)
  Verdict verdict = Verdict::Unknown;

  struct NoiseSplit {
    double delta = 0.0;          // total noise budget of the split
    double bound_at_delta = 0.0; // delta - delta^2 / lambda_min
    double optimal_delta = 0.0;  // lambda_min / 2
    double optimal_bound = 0.0;  // lambda_min / 4
  };
  std::optional<NoiseSplit> split;
};
DirectMatchReport sufficient_matching_direct(const DirectModel& dm,
                                             const Eigen::MatrixXd& gamma,
                                             double d);

// Splits an observed covariance sigma_y into hidden source and diagonal
// noise delta * gamma^{-2} (gamma a normalized diagonal). Throws
// HiddenSourceNotPD when the subtraction destroys positive definiteness.
DirectModel noise_split_model(const Eigen::MatrixXd& sigma_y,
                              const Eigen::MatrixXd& gamma, double delta);

}  // namespace gaussrd

#endif  // GAUSSRD_DUALITY_HPP
