#pragma once

// Brute-force linear-programming oracles used to cross-check the transport
// numerics. Deliberately independent of the library implementation: a dense
// two-phase primal simplex with Bland's rule, adequate for the small grids
// the tests use.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lp {

struct Problem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // row-major rows x cols
  std::vector<double> b;  // rows
  std::vector<double> c;  // cols
};

struct Solution {
  double objective = 0.0;
  std::vector<double> x;
};

// Minimizes c.x subject to A x = b, x >= 0.
inline Solution solve(Problem p) {
  constexpr double kOptTol = 1e-9;
  constexpr double kPivotTol = 1e-11;

  const std::size_t m = p.rows;
  const std::size_t n = p.cols;
  const std::size_t total = n + m;  // original + artificial

  for (std::size_t i = 0; i < m; ++i) {
    if (p.b[i] < 0.0) {
      p.b[i] = -p.b[i];
      for (std::size_t j = 0; j < n; ++j) p.a[i * n + j] = -p.a[i * n + j];
    }
  }

  // Tableau rows 0..m-1 constraints, row m reduced costs; column `total`
  // holds the rhs.
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(total + 1, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = p.a[i * n + j];
    t[i][n + i] = 1.0;
    t[i][total] = p.b[i];
    basis[i] = n + i;
  }

  auto pivot = [&](std::size_t pr, std::size_t pc) {
    double inv = 1.0 / t[pr][pc];
    for (std::size_t j = 0; j <= total; ++j) t[pr][j] *= inv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == pr) continue;
      double factor = t[i][pc];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j <= total; ++j) t[i][j] -= factor * t[pr][j];
    }
    if (pr < m) basis[pr] = pc;
  };

  auto iterate = [&](std::size_t entering_limit) {
    for (std::size_t guard = 0; guard < 100000; ++guard) {
      // Bland: smallest-index column with negative reduced cost.
      std::size_t enter = total;
      for (std::size_t j = 0; j < entering_limit; ++j) {
        if (t[m][j] < -kOptTol) {
          enter = j;
          break;
        }
      }
      if (enter == total) return;
      std::size_t leave = m;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] > kPivotTol) {
          double ratio = t[i][total] / t[i][enter];
          if (leave == m || ratio < best_ratio - kPivotTol ||
              (std::abs(ratio - best_ratio) <= kPivotTol &&
               basis[i] < basis[leave])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave == m) throw std::runtime_error("lp oracle: unbounded problem");
      pivot(leave, enter);
    }
    throw std::runtime_error("lp oracle: iteration guard exceeded");
  };

  // Phase 1: minimize the sum of artificials.
  for (std::size_t j = 0; j <= total; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += t[i][j];
    t[m][j] = (j >= n && j < total ? 1.0 : 0.0) - acc;
  }
  iterate(total);
  if (std::abs(t[m][total]) > 1e-7) {
    throw std::runtime_error("lp oracle: infeasible problem");
  }
  // Pivot artificials out of the basis where the row allows it; rows that
  // cannot pivot are redundant and stay at level zero.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(t[i][j]) > 1e-9) {
        pivot(i, j);
        break;
      }
    }
  }

  // Phase 2 reduced costs for the real objective.
  for (std::size_t j = 0; j <= total; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) acc += p.c[basis[i]] * t[i][j];
    }
    t[m][j] = (j < n ? p.c[j] : 0.0) - acc;
  }
  iterate(n);  // artificials may not re-enter

  Solution sol;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = t[i][total];
  }
  for (std::size_t j = 0; j < n; ++j) sol.objective += p.c[j] * sol.x[j];
  return sol;
}

inline double grid_cost(std::size_t i, std::size_t j, std::size_t n) {
  double ci = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  double cj = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
  return std::abs(ci - cj);
}

// Exact optimal-transport cost between two mass vectors on the shared grid.
inline double transport_lp_cost(const std::vector<double>& mu,
                                const std::vector<double>& nu) {
  const std::size_t n = mu.size();
  Problem p;
  p.rows = 2 * n;
  p.cols = n * n;
  p.a.assign(p.rows * p.cols, 0.0);
  p.b.resize(p.rows);
  p.c.resize(p.cols);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t var = i * n + j;
      p.c[var] = grid_cost(i, j, n);
      p.a[i * p.cols + var] = 1.0;        // row sum i
      p.a[(n + j) * p.cols + var] = 1.0;  // col sum j
    }
  }
  for (std::size_t i = 0; i < n; ++i) p.b[i] = mu[i];
  for (std::size_t j = 0; j < n; ++j) p.b[n + j] = nu[j];
  return solve(std::move(p)).objective;
}

struct BarycenterLp {
  double objective = 0.0;
  std::vector<double> barycenter;
};

// Exact fixed-support barycenter: minimizes sum_a w_a * W1(B, S_a) over B on
// the grid simplex, jointly with the couplings.
inline BarycenterLp barycenter_lp(const std::vector<std::vector<double>>& hists,
                                  const std::vector<double>& weights) {
  const std::size_t a_count = hists.size();
  const std::size_t n = hists[0].size();
  Problem p;
  p.cols = n + a_count * n * n;  // B then T^a blocks
  p.rows = a_count * 2 * n;
  p.a.assign(p.rows * p.cols, 0.0);
  p.b.assign(p.rows, 0.0);
  p.c.assign(p.cols, 0.0);

  auto tvar = [&](std::size_t a, std::size_t i, std::size_t j) {
    return n + a * n * n + i * n + j;
  };
  for (std::size_t a = 0; a < a_count; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t row = a * 2 * n + i;  // sum_j T^a_ij - B_i = 0
      p.a[row * p.cols + i] = -1.0;
      for (std::size_t j = 0; j < n; ++j) {
        p.a[row * p.cols + tvar(a, i, j)] = 1.0;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t row = a * 2 * n + n + j;  // sum_i T^a_ij = S_a[j]
      for (std::size_t i = 0; i < n; ++i) {
        p.a[row * p.cols + tvar(a, i, j)] = 1.0;
      }
      p.b[row] = hists[a][j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        p.c[tvar(a, i, j)] = weights[a] * grid_cost(i, j, n);
      }
    }
  }
  Solution sol = solve(std::move(p));
  BarycenterLp out;
  out.objective = sol.objective;
  out.barycenter.assign(sol.x.begin(), sol.x.begin() + n);
  return out;
}

}  // namespace lp
