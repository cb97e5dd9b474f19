#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "invp/interval.hpp"

namespace invp {

enum class ErrorCode {
  kInvalidInput,
  kNonMarkov,
  kNotExpanding,
  kReducible,
  kResourceLimit,
  kInadmissible,
  kContractionViolated,
  kImageEscapes,
  kCountMismatch,
  kUnsupported,
  kDepthExhausted,
  kNotShadowed,
  kNotRecoded,
  kNoSignChange,
  kNotMonotone,
  kEpsilonTooLarge,
  kUncoverable,
  kRhoOutOfRange,
  kScaleTooFine,
  kConfigInvalid,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class UncoverableError : public Error {
 public:
  UncoverableError(Interval gap, const std::string& what)
      : Error(ErrorCode::kUncoverable, what), gap_(gap) {}

  // Open interval of target points no candidate reaches.
  Interval gap() const noexcept { return gap_; }

 private:
  Interval gap_;
};

}  // namespace invp
