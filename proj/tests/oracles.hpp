#pragma once

#include "tropskel/smith.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace tropskel::testing {

// Union-find count of solution components on the 2 pi / K grid, joining grid
// solutions that differ by a small kernel vector of the rows.
inline int brute_force_components(const IntMatrix& rows, int n, int k) {
  std::vector<std::vector<int>> solutions;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  const int total = static_cast<int>(std::pow(k, n));
  for (int code = 0; code < total; ++code) {
    int c = code;
    for (int i = 0; i < n; ++i) {
      idx[static_cast<std::size_t>(i)] = c % k;
      c /= k;
    }
    bool ok = true;
    for (const auto& r : rows) {
      long s = 0;
      for (int i = 0; i < n; ++i) s += r[static_cast<std::size_t>(i)] * idx[static_cast<std::size_t>(i)];
      if (((s % k) + k) % k != 0) ok = false;
    }
    if (ok) solutions.push_back(idx);
  }
  std::vector<std::vector<int>> kernel;
  const int span = 5;
  for (int code = 0; code < static_cast<int>(std::pow(span, n)); ++code) {
    std::vector<int> v(static_cast<std::size_t>(n));
    int c = code;
    for (int i = 0; i < n; ++i) {
      v[static_cast<std::size_t>(i)] = c % span - span / 2;
      c /= span;
    }
    bool zero = std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
    bool in_kernel = !zero;
    for (const auto& r : rows) {
      long s = 0;
      for (int i = 0; i < n; ++i) s += r[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
      if (s != 0) in_kernel = false;
    }
    if (in_kernel) kernel.push_back(v);
  }
  std::vector<int> parent(solutions.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) { return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = root(parent[static_cast<std::size_t>(x)]); };
  for (std::size_t a = 0; a < solutions.size(); ++a) {
    for (const auto& v : kernel) {
      std::vector<int> moved = solutions[a];
      for (int i = 0; i < n; ++i) {
        moved[static_cast<std::size_t>(i)] = ((moved[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(i)]) % k + k) % k;
      }
      const auto it = std::find(solutions.begin(), solutions.end(), moved);
      if (it != solutions.end()) parent[static_cast<std::size_t>(root(static_cast<int>(a)))] = root(static_cast<int>(it - solutions.begin()));
    }
  }
  int count = 0;
  for (std::size_t a = 0; a < solutions.size(); ++a) count += root(static_cast<int>(a)) == static_cast<int>(a);
  return count;
}

}  // namespace tropskel::testing
