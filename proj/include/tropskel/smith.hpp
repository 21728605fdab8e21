#pragma once

#include <cstdint>
#include <vector>

namespace tropskel {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

// U A W = D with U, W unimodular and D diagonal (d_1 | d_2 | ...).
struct SmithForm {
  IntMatrix u;
  IntMatrix w;
  IntMatrix w_inv;
  std::vector<std::int64_t> diag;  // min(rows, cols) entries, nonnegative
};

SmithForm smith_normal_form(const IntMatrix& a);

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);
IntMatrix identity_matrix(int n);

}  // namespace tropskel
