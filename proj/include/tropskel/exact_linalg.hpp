#pragma once

#include "tropskel/rational.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace tropskel {

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;

namespace exact {

// Unique solution of the square system A x = b, or nullopt when A is singular.
std::optional<RationalVector> solve(RationalMatrix a, RationalVector b);

int rank(RationalMatrix a);

Rational determinant(RationalMatrix a);

// Basis of {x : A x = 0}; `cols` is needed when A has no rows.
std::vector<RationalVector> nullspace(RationalMatrix a, int cols);

Rational dot(const RationalVector& a, const RationalVector& b);

RationalVector sub(const RationalVector& a, const RationalVector& b);

RationalVector scale(const RationalVector& a, const Rational& s);

Eigen::VectorXd to_eigen(const RationalVector& v);

}  // namespace exact
}  // namespace tropskel
