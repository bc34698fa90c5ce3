// Independent optimal-assignment oracle (bitmask DP over columns), used to
// verify the Hungarian solver. Objective mirrors the solver contract:
// maximize the number of finite-cost matches, then minimize total cost.
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace vegtrack::test {

struct BruteForceResult {
  int matched = 0;
  double total_cost = 0.0;
};

// cost is rows x cols row-major; forbidden cells hold +infinity.
// cols must be <= 20 or so (2^cols DP states).
inline BruteForceResult brute_force_assignment(const std::vector<double>& cost,
                                               int rows, int cols) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t nstates = std::size_t{1} << cols;
  // best[mask] = (max matched, min cost) after assigning some prefix of rows
  // to the column set 'mask'.
  std::vector<int> best_m(nstates, -1);
  std::vector<double> best_c(nstates, inf);
  best_m[0] = 0;
  best_c[0] = 0.0;
  for (int r = 0; r < rows; ++r) {
    std::vector<int> next_m(nstates, -1);
    std::vector<double> next_c(nstates, inf);
    for (std::size_t mask = 0; mask < nstates; ++mask) {
      if (best_m[mask] < 0) continue;
      // row r left unmatched
      if (best_m[mask] > next_m[mask] ||
          (best_m[mask] == next_m[mask] && best_c[mask] < next_c[mask])) {
        next_m[mask] = best_m[mask];
        next_c[mask] = best_c[mask];
      }
      for (int c = 0; c < cols; ++c) {
        if (mask & (std::size_t{1} << c)) continue;
        double cell = cost[static_cast<std::size_t>(r) * cols + c];
        if (cell == inf) continue;
        std::size_t nm = mask | (std::size_t{1} << c);
        int m2 = best_m[mask] + 1;
        double c2 = best_c[mask] + cell;
        if (m2 > next_m[nm] || (m2 == next_m[nm] && c2 < next_c[nm])) {
          next_m[nm] = m2;
          next_c[nm] = c2;
        }
      }
    }
    best_m.swap(next_m);
    best_c.swap(next_c);
  }
  BruteForceResult out;
  for (std::size_t mask = 0; mask < nstates; ++mask) {
    if (best_m[mask] > out.matched ||
        (best_m[mask] == out.matched && best_c[mask] < out.total_cost)) {
      out.matched = best_m[mask];
      out.total_cost = best_c[mask];
    }
  }
  return out;
}

}  // namespace vegtrack::test
