#include "gaussrd/two_terminal.hpp"

#include <algorithm>
#include <cmath>

namespace gaussrd::twoterm {

TwoTerminalInstance validate_instance(TwoTerminalInstance raw) {
  if (!(raw.rho >= 0.0 && raw.rho < 1.0))
    throw DimensionMismatch("rho must lie in [0, 1)");
  if (!(raw.d1 > 0.0) || !(raw.d2 > 0.0))
    throw DistortionNotPositive("d1, d2 must be positive");
  return raw;
}

bool in_closed_form_region(const TwoTerminalInstance& inst) {
  double hi = std::max(inst.d1, inst.d2);
  double lo = std::min(inst.d1, inst.d2);
  double rho2 = inst.rho * inst.rho;
  return hi <= std::min(1.0, rho2 * lo + 1.0 - rho2);
}

double optimal_sum_rate(const TwoTerminalInstance& inst) {
  if (!in_closed_form_region(inst))
    throw OutsideD("instance outside the matched distortion set");
  double rho2 = inst.rho * inst.rho;
  double one_m = 1.0 - rho2;
  double prod = inst.d1 * inst.d2;
  double beta = 1.0 + std::sqrt(1.0 + 4.0 * rho2 * prod / (one_m * one_m));
  return std::max(0.0, 0.5 * std::log(one_m * (beta / 2.0) / prod));
}

bool helper_region_contains(double rho, int i, double d_i,
                            const RateVector& rv) {
  if (i != 1 && i != 2) throw DimensionMismatch("i must be 1 or 2");
  if (rv.size() != 2) throw DimensionMismatch("rate vector must have length 2");
  if (!(rho >= 0.0 && rho < 1.0))
    throw DimensionMismatch("rho must lie in [0, 1)");
  if (!(d_i > 0.0)) throw DistortionNotPositive("d_i");
  double r_own = rv.rates[i - 1];
  double r_other = rv.rates[2 - i];
  double s = std::exp(-2.0 * r_other);  // in (0, 1] since rates >= 0
  double rho2 = rho * rho;
  double bound =
      0.5 * std::log((1.0 - rho2) / d_i * (1.0 + rho2 / (1.0 - rho2) * s));
  bound = std::max(0.0, bound);
  return r_own >= bound - 1e-12 * (1.0 + bound);
}

}  // namespace gaussrd::twoterm
