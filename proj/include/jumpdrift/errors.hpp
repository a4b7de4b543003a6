#pragma once

#include <stdexcept>
#include <string>

namespace jumpdrift {

// Base of every error raised by the library. The CLI maps any Error to exit
// code 2 and prints what() on a single line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define JUMPDRIFT_DEFINE_ERROR(Name)          \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  }

JUMPDRIFT_DEFINE_ERROR(ValidationError);
JUMPDRIFT_DEFINE_ERROR(NoSolution);
JUMPDRIFT_DEFINE_ERROR(WrongMeasure);
JUMPDRIFT_DEFINE_ERROR(DomainError);
JUMPDRIFT_DEFINE_ERROR(UnsupportedMethod);
JUMPDRIFT_DEFINE_ERROR(GridError);
JUMPDRIFT_DEFINE_ERROR(NumericalError);
JUMPDRIFT_DEFINE_ERROR(NegativeIntensity);
JUMPDRIFT_DEFINE_ERROR(OutOfBounds);
JUMPDRIFT_DEFINE_ERROR(LatticeError);
JUMPDRIFT_DEFINE_ERROR(NoBracket);
JUMPDRIFT_DEFINE_ERROR(PathBlowup);
JUMPDRIFT_DEFINE_ERROR(UnknownFigure);
JUMPDRIFT_DEFINE_ERROR(ConfigError);

#undef JUMPDRIFT_DEFINE_ERROR

}  // namespace jumpdrift
