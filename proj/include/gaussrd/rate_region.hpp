#ifndef GAUSSRD_RATE_REGION_HPP
#define GAUSSRD_RATE_REGION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "gaussrd/model.hpp"

namespace gaussrd {

// Subsets of {0..L-1} as bit masks; L is capped at 16.
using SubsetMask = unsigned;

constexpr int kMaxSubsetDim = 16;

// Encoder rate vector (nats per sample), the coordinates constrained by
// the per-subset bounds.
struct RateVector {
  Eigen::VectorXd rates;

  RateVector() = default;
  explicit RateVector(Eigen::VectorXd v);
  int size() const { return static_cast<int>(rates.size()); }
};

// Map from every subset of {0..L-1} to a nonnegative real, f(empty) = 0.
struct SubsetFunction {
  int l = 0;
  std::vector<double> values;  // indexed by mask

  double operator()(SubsetMask s) const { return values[s]; }
};

// Lower per-subset rate bound at determinant budget theta:
//   1/2 log^+ [ prod_{i in S} e^{2 r_i} / (theta |G(u zeroed on S)|) ].
double lower_rate_bound(const SourceModel& model, SubsetMask s, double theta,
                        const RateAllocation& r);

// Upper per-subset rate bound:
//   1/2 log [ |G(u)| prod_{i in S} e^{2 r_i} / |G(u zeroed on S)| ] >= 0.
double upper_rate_bound(const SourceModel& model, SubsetMask s,
                        const RateAllocation& r);

// Does the allocation meet the distortion criterion?
//   Matrix: G(u)^{-1} <= sigma_d (PSD order)
//   Vector: diag(gamma G(u)^{-1} gamma^T) <= d componentwise
//   Sum:    tr(gamma G(u)^{-1} gamma^T) <= d
bool feasible(const SourceModel& model, const DistortionSpec& spec,
              const RateAllocation& r);

// Amount by which the spec clears the nonvoidness threshold at full
// observation rates; <= 0 means the region is empty (strict rule).
double feasibility_margin(const SourceModel& model, const DistortionSpec& spec);

// Throws InfeasibleSpec unless feasibility_margin is strictly positive
// (margin rule: equality counts as infeasible).
void require_nonvoid(const SourceModel& model, const DistortionSpec& spec);

// Table of all per-subset bounds. theta set selects the lower bounds,
// nullopt the upper bounds.
SubsetFunction subset_bounds(const SourceModel& model, const RateAllocation& r,
                             std::optional<double> theta);

// With theta given checks sum_{i in S} R_i >= lower bound for every
// nonempty S; with nullopt uses the upper bounds (inner polyhedron).
bool polyhedron_contains(const SourceModel& model, const RateVector& rv,
                         const RateAllocation& r, std::optional<double> theta);

// Violations of the co-polymatroid laws (zero at empty set, monotone,
// supermodular) for the per-subset bound table.
struct LawViolation {
  enum class Kind { EmptySet, Monotone, Supermodular } kind;
  SubsetMask a = 0;
  SubsetMask b = 0;
  double amount = 0.0;
};
std::vector<LawViolation> copolymatroid_violations(
    const SourceModel& model, const RateAllocation& r,
    std::optional<double> theta);

// Greedy corner point of the inner polyhedron along the given encoder
// ordering (a permutation of 0..L-1).
RateVector corner_point(const SourceModel& model, const RateAllocation& r,
                        const std::vector<int>& order);

struct SumRateResult {
  double value = 0.0;
  RateAllocation argmin;
};

// Minimum achievable sum rate over the admissible allocations:
//   min_r  sum_i r_i + 1/2 log(|G(u)| / |sigma_x^{-1}|).
// Multistart simplex descent; throws InfeasibleSpec on empty regions.
SumRateResult sum_rate_inner(const SourceModel& model,
                             const DistortionSpec& spec);

// Converse sum-rate bound for the sum criterion:
//   min_{r in budget set}  lower_rate_bound(full set, waterfill_det, r).
// Never exceeds sum_rate_inner.
SumRateResult sum_rate_outer(const SourceModel& model,
                             const SumDistortion& spec);

struct SearchConfig {
  int starts = 16;
  int max_iter = 4000;
  std::uint64_t seed = 1;
  double cert_tol = 1e-9;     // certificate acceptance
  double exclude_tol = 1e-6;  // minimum margin to call a point excluded
};

// Single-point certificates for membership of a rate vector in the
// distortion-constrained region.
struct MembershipVerdict {
  enum class Kind { InnerCertified, OuterCertified, ExcludedHeuristic,
                    Undetermined };
  Kind kind = Kind::Undetermined;
  RateAllocation witness;  // certifying allocation (Inner/Outer)
  double theta = 0.0;      // determinant budget at the witness (Outer)
  double margin = 0.0;     // best residual violation (Excluded)
};

// InnerCertified: rv is achievable. OuterCertified: rv not ruled out.
// ExcludedHeuristic: local search kept the outer violation positive;
// not a proof. Undetermined otherwise.
MembershipVerdict membership_verdict(const SourceModel& model,
                                     const RateVector& rv,
                                     const DistortionSpec& spec,
                                     const SearchConfig& search = {});

}  // namespace gaussrd

#endif  // GAUSSRD_RATE_REGION_HPP
