#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lnport {

enum class ErrorCode {
  kIo,
  kParse,
  kInvalidArgument,
  kSingularCovariance,
  kDegenerateFrontier,
  kUndefinedPortfolio,
  kNoSolution,
  kNonPositiveMean,
  kOutsideDomain,
  kOverflow,
  kInternal,
};

/// Stable machine-readable name for an error code ("singular_covariance", ...).
std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the study harness in particular) can record it per cell.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lnport
