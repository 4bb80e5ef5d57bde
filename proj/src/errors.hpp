#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pencilfun {

enum class ErrorCode {
  NotPositiveDefinite = 1,
  NoConvergence,
  SingularFactor,
  DomainError,
  UnknownFunction,
  BadParameter,
  SizeCapExceeded,
  ParseError,
  ShapeError,
  IoError,
  Overflow,
};

const char* error_code_name(ErrorCode code) noexcept;

// Every failure in the library is reported through this exception. `index`
// carries the pivot / eigenvalue / line number the message refers to (1-based
// where the user sees it, -1 when not applicable); `values` carries offending
// numbers such as out-of-domain eigenvalues.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, long index = -1,
        std::vector<double> values = {})
      : std::runtime_error(message), code_(code), index_(index), values_(std::move(values)) {}

  ErrorCode code() const noexcept { return code_; }
  long index() const noexcept { return index_; }
  const std::vector<double>& values() const noexcept { return values_; }

  // Numerical failures as opposed to bad input.
  bool numerical() const noexcept {
    switch (code_) {
      case ErrorCode::NotPositiveDefinite:
      case ErrorCode::NoConvergence:
      case ErrorCode::SingularFactor:
      case ErrorCode::DomainError:
      case ErrorCode::Overflow:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
  long index_;
  std::vector<double> values_;
};

}  // namespace pencilfun
