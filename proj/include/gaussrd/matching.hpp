#ifndef GAUSSRD_MATCHING_HPP
#define GAUSSRD_MATCHING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "gaussrd/model.hpp"

namespace gaussrd {

// Outcome of the sufficient tightness test for the sum criterion.
struct MatchReport {
  enum class Verdict { Matched, Unknown, Infeasible };
  double feasible_lower = 0.0;  // tr(gamma cond_cov gamma^T)
  double threshold = 0.0;       // (K+1) / max information eigenvalue
  Verdict verdict = Verdict::Unknown;
};

// Largest eigenvalue of gamma^{-T} G gamma^{-1} at full observation
// precisions u_i = 1/noise_var[i].
double max_information_eigenvalue(const SourceModel& model,
                                  const Eigen::MatrixXd& gamma);

// Terms of the single-observation decomposition along direction i:
// eta excludes observation i's own precision (it does not depend on
// u_i); chi is its value with u_i saturated at 1/noise_var[i].
struct DirectionTerms {
  double eta = 0.0;
  double chi = 0.0;
};
DirectionTerms direction_terms(const SourceModel& model,
                               const Eigen::MatrixXd& gamma, int i,
                               const Eigen::VectorXd& u);

// Eigenvalue-spread sufficient condition at precision diagonal u:
//   1/alpha_min - 1/alpha_max <= 1/chi_i  for every i.
bool spread_condition_holds(const SourceModel& model,
                            const Eigen::MatrixXd& gamma,
                            const Eigen::VectorXd& u);

struct GridConfig {
  int axis_points = 32;     // geometric grid per axis in u-space
  int random_points = 64;   // random interior points
  double fd_step = 1e-4;    // forward difference step in r
  double tol = 1e-9;
  std::uint64_t seed = 2;
};

// Numerical falsification scan (not a proof): evaluates
// e^{-2 r_i} * waterfill_det over the budget set and reports the first
// increase beyond tolerance.
struct MdScanResult {
  bool holds = true;
  Eigen::VectorXd violation_r;  // set when holds is false
  int violation_axis = -1;
};
MdScanResult monotone_decrease_scan(const SourceModel& model,
                                    const Eigen::MatrixXd& gamma, double d,
                                    const GridConfig& grid = {});

// Sufficient tightness test: Matched when
//   tr(gamma cond_cov gamma^T) < d <= (K+1)/alpha_max_star,
// Infeasible when d is at or below the trace bound, Unknown otherwise
// (the condition is only sufficient).
MatchReport sufficient_matching(const SourceModel& model,
                                const Eigen::MatrixXd& gamma, double d);

}  // namespace gaussrd

#endif  // GAUSSRD_MATCHING_HPP
