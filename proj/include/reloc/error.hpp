#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reloc {

enum class ErrorCode {
  InvalidArgument,
  NotSquare,
  NegativeEntry,
  RowSumExceedsOne,
  Reducible,
  Periodic,
  NoConvergence,
  DegenerateImage,
  NonPositiveInput,
  ZeroRow,
  StateCapExceeded,
  OverflowGuard,
  Unsupported,
  ParseError,
  UnknownExperiment,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (notably the CLI) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Usage/config problems as opposed to numerical failures.
  bool is_usage_error() const noexcept {
    return code_ == ErrorCode::ParseError || code_ == ErrorCode::UnknownExperiment ||
           code_ == ErrorCode::InvalidArgument || code_ == ErrorCode::Io;
  }

 private:
  ErrorCode code_;
};

}  // namespace reloc
