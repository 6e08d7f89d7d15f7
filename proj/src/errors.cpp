#include "cgcv/errors.hpp"

namespace cgcv {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::DegenerateDenominator: return "degenerate_denominator";
    case ErrorKind::EmptyOverlap: return "empty_overlap";
    case ErrorKind::NonConvergence: return "non_convergence";
    case ErrorKind::NonGenericPoint: return "non_generic_point";
    case ErrorKind::Regime: return "regime";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Ok: return "ok";
    case Status::Degenerate: return "degenerate";
    case Status::EmptyOverlap: return "empty_overlap";
    case Status::NonConverged: return "non_converged";
  }
  return "unknown";
}

Status status_from(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyOverlap: return Status::EmptyOverlap;
    case ErrorKind::NonConvergence: return Status::NonConverged;
    default: return Status::Degenerate;
  }
}

void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string msg = context + ": " + e.what();
  if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e)) {
    throw ConvergenceError(msg, ce->iterate());
  }
  throw Error(e.kind(), msg);
}

}  // namespace cgcv
