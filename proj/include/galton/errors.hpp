#pragma once

#include <stdexcept>
#include <string>

namespace galton {

// Error taxonomy for the toolkit.  Every failure carries a stable machine
// code (used by the CLI's error JSON) and an exit class: configuration /
// input problems exit with status 1, numerical failures with status 2.
enum class ErrorClass { validation = 1, numerical = 2 };

class Error : public std::runtime_error {
public:
  Error(std::string code, ErrorClass cls, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)), class_(cls) {}
  const std::string& code() const noexcept { return code_; }
  ErrorClass error_class() const noexcept { return class_; }
  int exit_status() const noexcept { return static_cast<int>(class_); }

private:
  std::string code_;
  ErrorClass class_;
};

#define GALTON_DEFINE_ERROR(NAME, CLASS)                                     \
  class NAME : public Error {                                                \
  public:                                                                    \
    explicit NAME(const std::string& message)                                \
        : Error(#NAME, ErrorClass::CLASS, message) {}                        \
  };

// configuration / input validation (exit status 1)
GALTON_DEFINE_ERROR(InvalidConfig, validation)
GALTON_DEFINE_ERROR(GridEmpty, validation)
GALTON_DEFINE_ERROR(DimensionTooLarge, validation)
GALTON_DEFINE_ERROR(ShapeMismatch, validation)
GALTON_DEFINE_ERROR(NegativeGap, validation)
GALTON_DEFINE_ERROR(NonpositiveRate, validation)
GALTON_DEFINE_ERROR(BoardUninitialized, validation)
GALTON_DEFINE_ERROR(InvalidEndpoints, validation)
GALTON_DEFINE_ERROR(ProbabilityOutOfRange, validation)
GALTON_DEFINE_ERROR(LengthMismatch, validation)
GALTON_DEFINE_ERROR(UnnormalizedTable, validation)
GALTON_DEFINE_ERROR(BadSeed, validation)
GALTON_DEFINE_ERROR(EmptyRange, validation)
GALTON_DEFINE_ERROR(InsufficientData, validation)
GALTON_DEFINE_ERROR(EmptySeries, validation)
GALTON_DEFINE_ERROR(IoError, validation)

// numerical failures (exit status 2)
GALTON_DEFINE_ERROR(CrossingNotFound, numerical)
GALTON_DEFINE_ERROR(MinimizationDiverged, numerical)
GALTON_DEFINE_ERROR(PathExplosion, numerical)
GALTON_DEFINE_ERROR(NoConvergence, numerical)

#undef GALTON_DEFINE_ERROR

}  // namespace galton
