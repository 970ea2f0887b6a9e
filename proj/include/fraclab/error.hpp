#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

enum class ErrorKind {
  UnknownFamily,
  ParameterOutOfRange,
  GridMismatch,
  NonPositiveWeight,
  DivergentTail,
  EpsilonTooSmall,
  PoleOrUnsupported,
  OrderOutOfRange,
  IntegralOverflow,
  WindowTooNarrow,
  KernelNotMonotone,
  TailDivergence,
  QuadratureNotConverged,
  NonPeriodicInput,
  TruncationBudgetExceeded,
  ConfigInvalid,
  IoError,
};

const char* to_string(ErrorKind kind);

/// True for errors that mean "the numbers did not converge" rather than
/// "the request was malformed".
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fraclab
