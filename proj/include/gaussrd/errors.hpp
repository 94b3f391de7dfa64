#ifndef GAUSSRD_ERRORS_HPP
#define GAUSSRD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gaussrd {

// Base class for all library errors. Subtypes name the violated
// precondition or invariant; the CLI maps them onto exit codes.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define GAUSSRD_DEFINE_ERROR(NAME)                                   \
  struct NAME : Error {                                              \
    explicit NAME(const std::string& what) : Error(#NAME ": " + what) {} \
  }

// model validation
GAUSSRD_DEFINE_ERROR(NonSymmetric);
GAUSSRD_DEFINE_ERROR(NotPositiveDefinite);
GAUSSRD_DEFINE_ERROR(DimensionMismatch);
GAUSSRD_DEFINE_ERROR(NonpositiveNoise);
GAUSSRD_DEFINE_ERROR(NegativeRate);

// rate region / bounds
GAUSSRD_DEFINE_ERROR(EmptySubset);
GAUSSRD_DEFINE_ERROR(NonpositiveTheta);
GAUSSRD_DEFINE_ERROR(SpecDimensionMismatch);
GAUSSRD_DEFINE_ERROR(InfeasibleSpec);

// water filling
GAUSSRD_DEFINE_ERROR(SingularGamma);
GAUSSRD_DEFINE_ERROR(InsufficientBudget);
GAUSSRD_DEFINE_ERROR(InfeasibleAllocation);

// matching / duality
GAUSSRD_DEFINE_ERROR(ZeroObservationRow);
GAUSSRD_DEFINE_ERROR(HiddenSourceNotPD);

// two-terminal / cyclic
GAUSSRD_DEFINE_ERROR(OutsideD);
GAUSSRD_DEFINE_ERROR(DistortionNotPositive);

// simulation
GAUSSRD_DEFINE_ERROR(BadSampleCount);

// file I/O
GAUSSRD_DEFINE_ERROR(ParseError);

#undef GAUSSRD_DEFINE_ERROR

}  // namespace gaussrd

#endif  // GAUSSRD_ERRORS_HPP
