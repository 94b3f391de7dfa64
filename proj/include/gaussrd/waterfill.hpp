#ifndef GAUSSRD_WATERFILL_HPP
#define GAUSSRD_WATERFILL_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "gaussrd/model.hpp"

namespace gaussrd {

// Allocation of a distortion budget across eigenmodes. Each level is
// floored at the inverse eigenvalue; levels sum to the budget; omega is
// the product of levels (the |gamma|^{-2} factor is applied by callers
// that work in the distortion coordinates).
struct WaterSolution {
  double xi = 0.0;
  Eigen::VectorXd levels;
  double omega = 0.0;
};

// Eigenvalues (sorted ascending) of gamma^{-T} G(u) gamma^{-1}, where
// G(u) is the information matrix at rate allocation r. These are the
// inverse eigenvalues of gamma G(u)^{-1} gamma^T, which is the matrix
// actually constrained by the distortion budget.
Eigen::VectorXd information_spectrum(const SourceModel& model,
                                     const Eigen::MatrixXd& gamma,
                                     const RateAllocation& r);

// Same spectrum as a function of the precision diagonal u directly.
Eigen::VectorXd information_spectrum_u(const SourceModel& model,
                                       const Eigen::MatrixXd& gamma,
                                       const Eigen::VectorXd& u);

// Solves sum_i max(xi, 1/alpha_i) = d for the water level xi by bisection
// (200 iterations, absolute tolerance 1e-12). Throws InsufficientBudget
// when d < sum 1/alpha_i - tol.
WaterSolution water_level(const Eigen::VectorXd& alphas, double d);

// Closed-form maximum determinant over admissible distortion matrices
// under the sum criterion: |gamma|^{-2} prod_i max(xi, 1/alpha_i).
// Throws InfeasibleAllocation when r violates the budget.
double waterfill_det(const SourceModel& model, const Eigen::MatrixXd& gamma,
                     double d, const RateAllocation& r);

// Randomized search for the maximum determinant over admissible
// distortion matrices (Sum or Vector criterion). Every candidate is
// feasible, so the result is a certified lower bound; for Sum specs the
// constructed candidate attains waterfill_det exactly.
double max_det_search(const SourceModel& model, const DistortionSpec& spec,
                      const RateAllocation& r, int samples,
                      std::uint64_t seed);

// Coordinate-ascent maximization of the determinant under per-coordinate
// caps (vector criterion). Heuristic: no closed form exists for this
// criterion. 8 restarts x 200 sweeps, deterministic.
double max_det_vector(const SourceModel& model, const Eigen::MatrixXd& gamma,
                      const Eigen::VectorXd& d, const RateAllocation& r);

}  // namespace gaussrd

#endif  // GAUSSRD_WATERFILL_HPP
