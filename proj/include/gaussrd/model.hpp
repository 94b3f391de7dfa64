#ifndef GAUSSRD_MODEL_HPP
#define GAUSSRD_MODEL_HPP

#include <Eigen/Dense>
#include <variant>

#include "gaussrd/errors.hpp"

namespace gaussrd {

// Remote (indirect) problem instance: a hidden K-dimensional Gaussian
// source observed through L noisy linear measurements
//   Y = A X + N,   N_i ~ N(0, noise_var[i]) independent.
struct SourceModel {
  int k = 0;                  // hidden dimension
  int l = 0;                  // number of observations
  Eigen::MatrixXd sigma_x;    // K x K source covariance, symmetric PD
  Eigen::MatrixXd a;          // L x K observation map
  Eigen::VectorXd noise_var;  // L positive noise variances
};

// Per-encoder rate parameters (nats per sample), nonnegative.
struct RateAllocation {
  Eigen::VectorXd r;

  RateAllocation() = default;
  explicit RateAllocation(Eigen::VectorXd rates);
  int size() const { return static_cast<int>(r.size()); }
};

// Distortion criteria. Matrix: error covariance dominated by sigma_d in
// the PSD order. Vector: per-coordinate caps on diag(G E G^T). Sum:
// cap on tr(G E G^T).
struct MatrixDistortion {
  Eigen::MatrixXd sigma_d;
};
struct VectorDistortion {
  Eigen::MatrixXd gamma;
  Eigen::VectorXd d;
};
struct SumDistortion {
  Eigen::MatrixXd gamma;
  double d = 0.0;
};
using DistortionSpec = std::variant<MatrixDistortion, VectorDistortion, SumDistortion>;

// Scale-aware default tolerance for PSD checks.
double psd_tolerance(const Eigen::MatrixXd& m);

// Returns the model unchanged if every invariant holds, otherwise throws
// NonSymmetric / NotPositiveDefinite / DimensionMismatch / NonpositiveNoise.
SourceModel validate_model(SourceModel raw);

// Throws SpecDimensionMismatch / NotPositiveDefinite / SingularGamma when
// the spec is malformed for a K-dimensional source.
void validate_spec(const DistortionSpec& spec, int k);

// Posterior covariance of the source given all observations at full rate:
// (sigma_x^{-1} + A^T Sigma_N^{-1} A)^{-1}.
Eigen::MatrixXd conditional_covariance(const SourceModel& model);

// Diagonal of the rate-scaled noise precision matrix,
//   u_i = (1 - e^{-2 r_i}) / noise_var[i].
// u_i = 0 exactly when r_i = 0; the infinite-variance case never appears.
Eigen::VectorXd scaled_noise_precisions(const SourceModel& model,
                                        const RateAllocation& r);

// true iff m2 - m1 is PSD up to tol (tol < 0 selects the scale-aware default).
bool psd_leq(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2,
             double tol = -1.0);

// sigma_x^{-1} + A^T diag(u) A, the information matrix at precisions u.
Eigen::MatrixXd information_matrix(const SourceModel& model,
                                   const Eigen::VectorXd& u);

// log|M| for symmetric positive definite M; throws NotPositiveDefinite.
double logdet_pd(const Eigen::MatrixXd& m);

// Inverse via Cholesky; throws NotPositiveDefinite.
Eigen::MatrixXd inverse_pd(const Eigen::MatrixXd& m);

}  // namespace gaussrd

#endif  // GAUSSRD_MODEL_HPP
