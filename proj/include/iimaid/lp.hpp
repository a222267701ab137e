// Copyright 2026 The iimaid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense two-phase simplex for the small feasibility problems met when
// checking common priors. Bland's rule keeps it from cycling.

#pragma once

#include <cmath>
#include <vector>

namespace iimaid {

struct LpResult {
  bool feasible = false;
  bool bounded = true;
  double value = 0.0;
  std::vector<double> x;
};

// maximise c.x subject to A x = b, x >= 0.
inline LpResult lp_maximize(std::vector<std::vector<double>> A, std::vector<double> b, const std::vector<double>& c,
                            double eps = 1e-10) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    const double sign = b[r] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t[r][j] = sign * A[r][j];
    t[r][n + r] = 1.0;
    t[r][rhs] = sign * b[r];
    basis[r] = n + r;
  }
  auto pivot = [&](std::size_t row, std::size_t col) {
    const double d = t[row][col];
    for (double& v : t[row]) v /= d;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == row || t[r][col] == 0.0) continue;
      const double f = t[r][col];
      for (std::size_t j = 0; j < width; ++j) t[r][j] -= f * t[row][j];
    }
    basis[row] = col;
  };
  // Returns false when unbounded.
  auto run = [&](std::size_t allowed) {
    for (;;) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (t[m][j] < -eps) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return true;
      std::size_t leave = m;
      double best = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        if (t[r][enter] <= eps) continue;
        const double ratio = t[r][rhs] / t[r][enter];
        if (leave == m || ratio < best - eps || (std::abs(ratio - best) <= eps && basis[r] < basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
  };

  // Phase one: drive the artificial variables to zero.
  for (std::size_t j = n; j < n + m; ++j) t[m][j] = 1.0;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < width; ++j) t[m][j] -= t[r][j];
  }
  run(n + m);
  LpResult out;
  if (t[m][rhs] < -1e-9) return out;
  out.feasible = true;
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(t[r][j]) > eps) {
        pivot(r, j);
        break;
      }
    }
  }

  // Phase two over the original columns only.
  std::fill(t[m].begin(), t[m].end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];
  for (std::size_t r = 0; r < m; ++r) {
    const double f = t[m][basis[r]];
    if (f == 0.0) continue;
    for (std::size_t j = 0; j < width; ++j) t[m][j] -= f * t[r][j];
  }
  if (!run(n)) {
    out.bounded = false;
    return out;
  }
  out.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) out.x[basis[r]] = std::max(0.0, t[r][rhs]);
  }
  out.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) out.value += c[j] * out.x[j];
  return out;
}

}  // namespace iimaid
