#include "tropskel/smith.hpp"

#include "tropskel/errors.hpp"

#include <cstdlib>
#include <utility>

namespace tropskel {

IntMatrix identity_matrix(int n) {
  IntMatrix m(static_cast<std::size_t>(n), std::vector<std::int64_t>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  return m;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.empty()) return {};
  const std::size_t inner = b.size();
  const std::size_t cols = b.empty() ? 0 : b[0].size();
  IntMatrix c(a.size(), std::vector<std::int64_t>(cols, 0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < inner; ++k) {
      for (std::size_t j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

namespace {

struct Reducer {
  IntMatrix a, u, w, w_inv;
  std::size_t rows, cols;

  // row r += q * row s
  void add_row(std::size_t r, std::size_t s, std::int64_t q) {
    for (std::size_t j = 0; j < cols; ++j) a[r][j] += q * a[s][j];
    for (std::size_t j = 0; j < rows; ++j) u[r][j] += q * u[s][j];
  }
  void swap_rows(std::size_t r, std::size_t s) {
    std::swap(a[r], a[s]);
    std::swap(u[r], u[s]);
  }
  // col c += q * col s; the inverse subtracts q * row c from row s of w_inv.
  void add_col(std::size_t c, std::size_t s, std::int64_t q) {
    for (std::size_t i = 0; i < rows; ++i) a[i][c] += q * a[i][s];
    for (std::size_t i = 0; i < cols; ++i) w[i][c] += q * w[i][s];
    for (std::size_t j = 0; j < cols; ++j) w_inv[s][j] -= q * w_inv[c][j];
  }
  void swap_cols(std::size_t c, std::size_t s) {
    for (std::size_t i = 0; i < rows; ++i) std::swap(a[i][c], a[i][s]);
    for (std::size_t i = 0; i < cols; ++i) std::swap(w[i][c], w[i][s]);
    std::swap(w_inv[c], w_inv[s]);
  }
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a) {
  Reducer r;
  r.a = a;
  r.rows = a.size();
  r.cols = a.empty() ? 0 : a[0].size();
  for (const auto& row : a) {
    if (row.size() != r.cols) fail(ErrorKind::InvalidArgument, "ragged integer matrix");
  }
  r.u = identity_matrix(static_cast<int>(r.rows));
  r.w = identity_matrix(static_cast<int>(r.cols));
  r.w_inv = r.w;
  const std::size_t k = std::min(r.rows, r.cols);
  for (std::size_t t = 0; t < k; ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::size_t pi = t, pj = t;
      std::int64_t best = 0;
      for (std::size_t i = t; i < r.rows; ++i) {
        for (std::size_t j = t; j < r.cols; ++j) {
          const std::int64_t v = std::llabs(r.a[i][j]);
          if (v != 0 && (best == 0 || v < best)) {
            best = v;
            pi = i;
            pj = j;
          }
        }
      }
      if (best == 0) break;
      r.swap_rows(t, pi);
      r.swap_cols(t, pj);
      bool clean = true;
      for (std::size_t i = t + 1; i < r.rows; ++i) {
        r.add_row(i, t, -(r.a[i][t] / r.a[t][t]));
        if (r.a[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < r.cols; ++j) {
        r.add_col(j, t, -(r.a[t][j] / r.a[t][t]));
        if (r.a[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // Enforce divisibility of the remaining block by the pivot.
      bool divides = true;
      for (std::size_t i = t + 1; i < r.rows && divides; ++i) {
        for (std::size_t j = t + 1; j < r.cols; ++j) {
          if (r.a[i][j] % r.a[t][t] != 0) {
            r.add_row(t, i, 1);
            divides = false;
            break;
          }
        }
      }
      if (divides) break;
    }
    if (r.a[t][t] < 0) {
      for (std::size_t j = 0; j < r.cols; ++j) r.a[t][j] = -r.a[t][j];
      for (std::size_t j = 0; j < r.rows; ++j) r.u[t][j] = -r.u[t][j];
    }
  }
  SmithForm out;
  for (std::size_t t = 0; t < k; ++t) out.diag.push_back(r.a[t][t]);
  out.u = std::move(r.u);
  out.w = std::move(r.w);
  out.w_inv = std::move(r.w_inv);
  return out;
}

}  // namespace tropskel
