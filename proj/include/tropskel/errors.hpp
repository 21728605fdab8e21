#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tropskel {

enum class ErrorKind {
  NonGenericHeights,
  NotStar,
  DegenerateQ,
  PointOutsideQ,
  SimplexNotInTriangulation,
  OriginNotInterior,
  Unbounded,
  Unsupported,
  InconsistentLabel,
  NoRoot,
  NoConvergence,
  NotOnHypersurface,
  NotAdapted,
  EvalAtOriginOrder2,
  SeedFailed,
  CountMismatch,
  IndexMismatch,
  DivergentFlow,
  NotOnPositiveLocus,
  IncompleteFlowData,
  UnsupportedDimension,
  ParseError,
  SchemaError,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Every failure surfaced by the library carries a kind so callers (and the
// CLI exit-code mapping) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace tropskel
