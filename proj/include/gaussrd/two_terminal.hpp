#ifndef GAUSSRD_TWO_TERMINAL_HPP
#define GAUSSRD_TWO_TERMINAL_HPP

#include "gaussrd/rate_region.hpp"

namespace gaussrd::twoterm {

// Two correlated unit-variance sources with correlation rho in [0,1) and
// per-source distortion targets d1, d2. Closed-form references used as
// ground truth against the general machinery.
struct TwoTerminalInstance {
  double rho = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

TwoTerminalInstance validate_instance(TwoTerminalInstance raw);

// Membership of (d1, d2) in the distortion set where the straight
// sum-rate segment determines the optimum:
//   max{d1,d2} <= min{1, rho^2 min{d1,d2} + 1 - rho^2}.
// Boundary points count as inside.
bool in_closed_form_region(const TwoTerminalInstance& inst);

// Minimum sum rate (nats) for instances inside the set:
//   1/2 log[(1-rho^2) (beta/2) / (d1 d2)],
//   beta = 1 + sqrt(1 + 4 rho^2 d1 d2 / (1-rho^2)^2).
// Throws OutsideD otherwise.
double optimal_sum_rate(const TwoTerminalInstance& inst);

// One-helps-one region: does (R_1, R_2) satisfy
//   R_i >= 1/2 log^+[(1-rho^2)/d_i (1 + rho^2 s/(1-rho^2))]
// for some 0 < s <= 1 with R_{3-i} >= 1/2 log(1/s)? The bound is
// increasing in s, so s = e^{-2 R_{3-i}} is optimal and the search is
// eliminated analytically. i is 1-based.
bool helper_region_contains(double rho, int i, double d_i,
                            const RateVector& rv);

}  // namespace gaussrd::twoterm

#endif  // GAUSSRD_TWO_TERMINAL_HPP
