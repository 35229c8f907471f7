#pragma once

#include <stdexcept>
#include <string>

namespace lpsrp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LPSRP_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

LPSRP_DEFINE_ERROR(InvalidArgument);
LPSRP_DEFINE_ERROR(DegenerateGeometry);
LPSRP_DEFINE_ERROR(NoConvergence);
LPSRP_DEFINE_ERROR(SingularJacobian);
LPSRP_DEFINE_ERROR(OrderMismatch);
LPSRP_DEFINE_ERROR(ConvergenceDomain);
LPSRP_DEFINE_ERROR(StructureViolation);
LPSRP_DEFINE_ERROR(SingularOmegaStar);
LPSRP_DEFINE_ERROR(ZeroNormalizationComponent);
LPSRP_DEFINE_ERROR(IllConditioned);
LPSRP_DEFINE_ERROR(ResidualTooLarge);
LPSRP_DEFINE_ERROR(StepSizeUnderflow);
LPSRP_DEFINE_ERROR(MaxStepsExceeded);
LPSRP_DEFINE_ERROR(FormatError);

#undef LPSRP_DEFINE_ERROR

}  // namespace lpsrp
