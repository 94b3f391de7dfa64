#ifndef GAUSSRD_OPTIMIZE_HPP
#define GAUSSRD_OPTIMIZE_HPP

#include <Eigen/Dense>
#include <functional>

namespace gaussrd {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct NelderMeadOptions {
  int max_iter = 6000;
  double f_tol = 1e-12;  // simplex value spread
  double x_tol = 1e-11;  // simplex coordinate spread
};

struct MinimizeResult {
  double value = 0.0;
  Eigen::VectorXd x;
};

// Point index (1-based internally) of the Halton sequence in (0,1)^dim.
// Supports dim <= 16.
Eigen::VectorXd halton_point(int index, int dim);

// Downhill simplex restricted to the box [lo, hi]; evaluation points are
// clipped into the box. scale sets the initial simplex edge relative to
// the box width.
MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                           double scale, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi,
                           const NelderMeadOptions& opt = {});

// Golden-section minimization on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  int iters = 160);

}  // namespace gaussrd

#endif  // GAUSSRD_OPTIMIZE_HPP
