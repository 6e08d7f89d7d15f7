#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace cgcv {

enum class ErrorKind {
  InvalidInput,
  DegenerateDenominator,
  EmptyOverlap,
  NonConvergence,
  NonGenericPoint,
  Regime,
  Numerical,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is
/// what callers branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Coordinate descent ran out of iterations. Carries the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd iterate)
      : Error(ErrorKind::NonConvergence, what), iterate_(std::move(iterate)) {}

  const Eigen::VectorXd& iterate() const noexcept { return iterate_; }

 private:
  Eigen::VectorXd iterate_;
};

/// Outcome of a single estimator evaluation, as recorded in reports and
/// result tables.
enum class Status { Ok, Degenerate, EmptyOverlap, NonConverged };

std::string_view to_string(Status status);
Status status_from(ErrorKind kind);

// Rethrows the in-flight cgcv::Error with `context` prepended, keeping its
// kind (and iterate, for convergence failures).
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context);

}  // namespace cgcv
