#pragma once

#include <stdexcept>
#include <string>

namespace sgdg {

// Every library failure carries a stable machine-readable category; the CLI
// prints it on stderr and maps it to a nonzero exit code.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

#define SGDG_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

SGDG_DEFINE_ERROR(NotDecomposable)
SGDG_DEFINE_ERROR(NotPositiveDefinite)
SGDG_DEFINE_ERROR(UnsupportedCovarianceStructure)
SGDG_DEFINE_ERROR(SingularBlock)
SGDG_DEFINE_ERROR(InvalidDomain)
SGDG_DEFINE_ERROR(DimensionTooLarge)
SGDG_DEFINE_ERROR(DimensionMismatch)
SGDG_DEFINE_ERROR(NumericalFailure)
SGDG_DEFINE_ERROR(ProprietyViolation)
SGDG_DEFINE_ERROR(EmptyTrace)
SGDG_DEFINE_ERROR(NotConverged)
SGDG_DEFINE_ERROR(ParseError)
SGDG_DEFINE_ERROR(InvalidParams)

#undef SGDG_DEFINE_ERROR

}  // namespace sgdg
