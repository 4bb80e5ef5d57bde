#include "errors.hpp"

namespace pencilfun {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularFactor: return "SingularFactor";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Overflow: return "Overflow";
  }
  return "Unknown";
}

}  // namespace pencilfun
