#include "tropskel/errors.hpp"

namespace tropskel {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonGenericHeights: return "NonGenericHeights";
    case ErrorKind::NotStar: return "NotStar";
    case ErrorKind::DegenerateQ: return "DegenerateQ";
    case ErrorKind::PointOutsideQ: return "PointOutsideQ";
    case ErrorKind::SimplexNotInTriangulation: return "SimplexNotInTriangulation";
    case ErrorKind::OriginNotInterior: return "OriginNotInterior";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::InconsistentLabel: return "InconsistentLabel";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotOnHypersurface: return "NotOnHypersurface";
    case ErrorKind::NotAdapted: return "NotAdapted";
    case ErrorKind::EvalAtOriginOrder2: return "EvalAtOriginOrder2";
    case ErrorKind::SeedFailed: return "SeedFailed";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::IndexMismatch: return "IndexMismatch";
    case ErrorKind::DivergentFlow: return "DivergentFlow";
    case ErrorKind::NotOnPositiveLocus: return "NotOnPositiveLocus";
    case ErrorKind::IncompleteFlowData: return "IncompleteFlowData";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace tropskel
