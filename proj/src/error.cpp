#include "fraclab/error.hpp"

namespace fraclab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownFamily: return "UnknownFamily";
    case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::DivergentTail: return "DivergentTail";
    case ErrorKind::EpsilonTooSmall: return "EpsilonTooSmall";
    case ErrorKind::PoleOrUnsupported: return "PoleOrUnsupported";
    case ErrorKind::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorKind::IntegralOverflow: return "IntegralOverflow";
    case ErrorKind::WindowTooNarrow: return "WindowTooNarrow";
    case ErrorKind::KernelNotMonotone: return "KernelNotMonotone";
    case ErrorKind::TailDivergence: return "TailDivergence";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::NonPeriodicInput: return "NonPeriodicInput";
    case ErrorKind::TruncationBudgetExceeded: return "TruncationBudgetExceeded";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::QuadratureNotConverged:
    case ErrorKind::TruncationBudgetExceeded:
    case ErrorKind::IntegralOverflow:
    case ErrorKind::TailDivergence:
    case ErrorKind::DivergentTail:
      return true;
    default:
      return false;
  }
}

}  // namespace fraclab
