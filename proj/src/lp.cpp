#include "bsmg/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bsmg {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

struct Tableau {
  std::vector<std::vector<double>> a;  // each row has width ncols + 1 (rhs last)
  std::vector<int> basis;
  int ncols = 0;

  int rows() const { return static_cast<int>(a.size()); }
  double rhs(int i) const { return a[i][ncols]; }

  void pivot(int leave, int enter, std::vector<double>* obj) {
    std::vector<double>& prow = a[leave];
    const double piv = prow[enter];
    for (double& v : prow) v /= piv;
    for (int i = 0; i < rows(); ++i) {
      if (i == leave) continue;
      const double f = a[i][enter];
      if (f == 0.0) continue;
      for (int j = 0; j <= ncols; ++j) a[i][j] -= f * prow[j];
    }
    if (obj) {
      const double f = (*obj)[enter];
      if (f != 0.0)
        for (int j = 0; j <= ncols; ++j) (*obj)[j] -= f * prow[j];
    }
    basis[leave] = enter;
  }
};

// Primal simplex with Bland's rule: enter at the smallest improving column,
// leave at the smallest basis index among minimum ratios. Returns false when
// the objective is unbounded over the allowed columns.
template <typename Allowed>
bool run_simplex(Tableau& t, std::vector<double>& obj, Allowed allowed) {
  const int m = t.rows();
  long guard = 1000 + 200L * (m + t.ncols) * (m + t.ncols);
  while (guard-- > 0) {
    int enter = -1;
    for (int j = 0; j < t.ncols; ++j) {
      if (allowed(j) && obj[j] > kCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;

    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      const double aij = t.a[i][enter];
      if (aij <= kPivotTol) continue;
      const double ratio = t.rhs(i) / aij;
      const double slack = 1e-12 * (1.0 + std::fabs(best));
      if (leave < 0 || ratio < best - slack ||
          (ratio < best + slack && t.basis[i] < t.basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) return false;
    t.pivot(leave, enter, &obj);
  }
  throw std::runtime_error("simplex iteration limit exceeded");
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int n = lp.num_vars();
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> lb(n, 0.0);
  if (!lp.lower_bounds.empty()) {
    if (static_cast<int>(lp.lower_bounds.size()) != n)
      throw std::invalid_argument("lower bound count mismatch");
    lb = lp.lower_bounds;
  }
  for (const auto& row : lp.rows) {
    if (static_cast<int>(row.coeffs.size()) != n)
      throw std::invalid_argument("constraint width mismatch");
    if (row.dir != '<' && row.dir != '>' && row.dir != '=')
      throw std::invalid_argument("constraint direction must be <, > or =");
  }

  // Shift finite lower bounds to zero and split free variables into a
  // positive and a negated column.
  std::vector<int> pos_col(n), neg_col(n, -1);
  int ncols = 0;
  for (int j = 0; j < n; ++j) {
    pos_col[j] = ncols++;
    if (lb[j] == ninf) neg_col[j] = ncols++;
  }
  const int m = static_cast<int>(lp.rows.size());
  int slack_base = ncols;
  for (const auto& row : lp.rows)
    if (row.dir != '=') ++ncols;

  Tableau t;
  t.ncols = ncols + m;  // one artificial column per row
  t.a.assign(m, std::vector<double>(t.ncols + 1, 0.0));
  t.basis.resize(m);
  double scale = 1.0;
  int next_slack = slack_base;
  for (int i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    std::vector<double>& out = t.a[i];
    double rhs = row.rhs;
    for (int j = 0; j < n; ++j) {
      const double c = row.coeffs[j];
      out[pos_col[j]] = c;
      if (neg_col[j] >= 0) {
        out[neg_col[j]] = -c;
      } else {
        rhs -= c * lb[j];
      }
    }
    if (row.dir == '<') out[next_slack++] = 1.0;
    if (row.dir == '>') out[next_slack++] = -1.0;
    if (rhs < 0.0) {
      for (double& v : out) v = -v;
      rhs = -rhs;
    }
    out[t.ncols] = rhs;
    scale = std::max(scale, rhs);
    out[ncols + i] = 1.0;  // artificial starts basic
    t.basis[i] = ncols + i;
  }

  // Pristine copy and row identities, for refactorization after phase 2.
  const std::vector<std::vector<double>> pristine = t.a;
  std::vector<int> row_id(m);
  for (int i = 0; i < m; ++i) row_id[i] = i;

  // Phase 1: maximize minus the sum of artificials.
  std::vector<double> obj(t.ncols + 1, 0.0);
  for (int i = 0; i < m; ++i) obj[ncols + i] = -1.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= t.ncols; ++j) obj[j] += t.a[i][j];
  run_simplex(t, obj, [](int) { return true; });

  double infeasibility = 0.0;
  for (int i = 0; i < m; ++i)
    if (t.basis[i] >= ncols) infeasibility += t.rhs(i);
  if (infeasibility > 1e-8 * scale) return {LpStatus::infeasible, {}, 0.0};

  // Pivot leftover artificials out; rows that cannot release one are
  // redundant and dropped.
  for (int i = static_cast<int>(t.a.size()) - 1; i >= 0; --i) {
    if (t.basis[i] < ncols) continue;
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (std::fabs(t.a[i][j]) > kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter >= 0) {
      t.pivot(i, enter, nullptr);
    } else {
      t.a.erase(t.a.begin() + i);
      t.basis.erase(t.basis.begin() + i);
      row_id.erase(row_id.begin() + i);
    }
  }

  // Phase 2 over the original objective, artificial columns locked out.
  const auto rebuild_cost = [&](std::vector<double>& cost) {
    cost.assign(t.ncols + 1, 0.0);
    for (int j = 0; j < n; ++j) {
      cost[pos_col[j]] = lp.objective[j];
      if (neg_col[j] >= 0) cost[neg_col[j]] = -lp.objective[j];
    }
    for (int i = 0; i < t.rows(); ++i) {
      const double f = cost[t.basis[i]];
      if (f == 0.0) continue;
      for (int j = 0; j <= t.ncols; ++j) cost[j] -= f * t.a[i][j];
    }
  };
  std::vector<double> cost;
  rebuild_cost(cost);
  if (!run_simplex(t, cost, [ncols](int j) { return j < ncols; }))
    return {LpStatus::unbounded, {}, 0.0};

  // Long degenerate pivot chains let roundoff build up in the tableau, so
  // recompute it exactly from the pristine rows under the current basis and
  // resume pivoting until the reduced costs are clean on refreshed data.
  const auto refresh = [&]() -> bool {
    const int k = t.rows();
    if (k == 0) return false;
    const int width = t.ncols + 1;
    std::vector<std::vector<double>> aug(k,
                                         std::vector<double>(k + width, 0.0));
    for (int r = 0; r < k; ++r) {
      const std::vector<double>& src = pristine[row_id[r]];
      for (int c = 0; c < k; ++c) aug[r][c] = src[t.basis[c]];
      for (int j = 0; j < width; ++j) aug[r][k + j] = src[j];
    }
    for (int col = 0; col < k; ++col) {
      int piv = -1;
      double best = 1e-11;
      for (int r = col; r < k; ++r)
        if (std::fabs(aug[r][col]) > best) {
          best = std::fabs(aug[r][col]);
          piv = r;
        }
      if (piv < 0) return false;  // basis numerically singular; keep as is
      std::swap(aug[col], aug[piv]);
      const double d = aug[col][col];
      for (int j = col; j < k + width; ++j) aug[col][j] /= d;
      for (int r = 0; r < k; ++r) {
        if (r == col || aug[r][col] == 0.0) continue;
        const double f = aug[r][col];
        for (int j = col; j < k + width; ++j) aug[r][j] -= f * aug[col][j];
      }
    }
    // Row r now expresses basis[r] exactly; a tiny negative basic value is
    // a degenerate vertex, a large one means the basis path was unsound.
    for (int r = 0; r < k; ++r) {
      const double rhs = aug[r][k + t.ncols];
      if (rhs < -1e-9 * scale) return false;
    }
    for (int r = 0; r < k; ++r) {
      for (int j = 0; j < width; ++j) t.a[r][j] = aug[r][k + j];
      if (t.a[r][t.ncols] < 0.0) t.a[r][t.ncols] = 0.0;
    }
    return true;
  };
  for (int round = 0; round < 5; ++round) {
    if (!refresh()) break;
    rebuild_cost(cost);
    bool improving = false;
    for (int j = 0; j < ncols && !improving; ++j)
      improving = cost[j] > kCostTol;
    if (!improving) break;
    if (!run_simplex(t, cost, [ncols](int j) { return j < ncols; }))
      return {LpStatus::unbounded, {}, 0.0};
  }

  std::vector<double> packed(t.ncols, 0.0);
  for (int i = 0; i < t.rows(); ++i) packed[t.basis[i]] = t.rhs(i);
  LpSolution sol;
  sol.status = LpStatus::optimal;
  sol.point.resize(n);
  for (int j = 0; j < n; ++j) {
    double v = packed[pos_col[j]];
    if (neg_col[j] >= 0) {
      v -= packed[neg_col[j]];
    } else {
      v += lb[j];
    }
    sol.point[j] = v;
    sol.value += lp.objective[j] * v;
  }
  return sol;
}

}  // namespace bsmg
