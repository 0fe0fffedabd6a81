#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hsplab {

enum class ErrorCode {
  InvalidEncoding,
  BadSpec,
  BoundExceeded,
  TooLarge,
  OracleInconsistent,
  RoundBudgetExceeded,
  NoOrderBound,
  NotAbelian,
  NotCommuting,
  QuotientNotAbelian,
  ExpressFailure,
  CommutatorBoundExceeded,
  NotElementaryAbelian2,
  NotNormal,
  QuotientBoundExceeded,
  NotCyclicQuotient,
  UnsupportedInstance,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidEncoding: return "InvalidEncoding";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::BoundExceeded: return "BoundExceeded";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::OracleInconsistent: return "OracleInconsistent";
    case ErrorCode::RoundBudgetExceeded: return "RoundBudgetExceeded";
    case ErrorCode::NoOrderBound: return "NoOrderBound";
    case ErrorCode::NotAbelian: return "NotAbelian";
    case ErrorCode::NotCommuting: return "NotCommuting";
    case ErrorCode::QuotientNotAbelian: return "QuotientNotAbelian";
    case ErrorCode::ExpressFailure: return "ExpressFailure";
    case ErrorCode::CommutatorBoundExceeded: return "CommutatorBoundExceeded";
    case ErrorCode::NotElementaryAbelian2: return "NotElementaryAbelian2";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::QuotientBoundExceeded: return "QuotientBoundExceeded";
    case ErrorCode::NotCyclicQuotient: return "NotCyclicQuotient";
    case ErrorCode::UnsupportedInstance: return "UnsupportedInstance";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hsplab
