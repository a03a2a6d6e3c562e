#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sphrad {

enum class ErrorCode : std::uint8_t {
  InvalidArgument,
  NotPositiveDefinite,
  InteriorViolated,
  BracketFailure,
  ProjectionDiverged,
  TransversalityBreakdown,
  MissingSensitivity,
  NoFeasibleStart,
  LPInfeasible,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a code so callers (the CLI in
// particular) can map it onto exit statuses without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // True for errors that indicate a modelling/numerical defect rather than a
  // malformed request.
  bool is_numerical() const noexcept { return code_ != ErrorCode::InvalidArgument; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace sphrad
