#include "bsmg/stage_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "bsmg/lp.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bsmg {
namespace {

void check_game(const StageGame& g) {
  if (g.theta.empty() || g.leader_matrices.size() != g.theta.size() ||
      g.follower_matrices.size() != g.theta.size())
    throw std::invalid_argument("stage game with mismatched type count");
  const int nd = g.num_leader_actions();
  if (nd == 0) throw std::invalid_argument("stage game without leader actions");
  for (std::size_t i = 0; i < g.theta.size(); ++i) {
    if (g.leader_matrices[i].rows != nd || g.follower_matrices[i].rows != nd ||
        g.leader_matrices[i].cols != g.follower_matrices[i].cols ||
        g.leader_matrices[i].cols == 0)
      throw std::invalid_argument("stage game with mismatched matrices");
  }
}

void decode_profile(std::int64_t idx, const std::vector<int>& sizes,
                    std::vector<int>& out) {
  for (int i = static_cast<int>(sizes.size()) - 1; i >= 0; --i) {
    out[i] = static_cast<int>(idx % sizes[i]);
    idx /= sizes[i];
  }
}

// Leader LP for one joint response profile: maximize expected leader payoff
// over the simplex subject to each type weakly preferring its assigned
// column. Compact feasible region, so the result is optimal or infeasible.
LpSolution profile_lp(const StageGame& g, const std::vector<int>& js) {
  const int nd = g.num_leader_actions();
  const int nt = g.num_types();
  LinearProgram lp;
  lp.objective.assign(nd, 0.0);
  for (int i = 0; i < nt; ++i) {
    for (int d = 0; d < nd; ++d)
      lp.objective[d] += g.theta[i] * g.leader_matrices[i](d, js[i]);
  }
  lp.add_row(std::vector<double>(nd, 1.0), '=', 1.0);
  for (int i = 0; i < nt; ++i) {
    const Matrix& f = g.follower_matrices[i];
    for (int k = 0; k < f.cols; ++k) {
      if (k == js[i]) continue;
      std::vector<double> row(nd);
      for (int d = 0; d < nd; ++d) row[d] = f(d, js[i]) - f(d, k);
      lp.add_row(std::move(row), '>', 0.0);
    }
  }
  return solve_lp(lp);
}

struct Candidate {
  double value = 0.0;
  std::int64_t idx = -1;

  bool beats(const Candidate& o) const {
    if (o.idx < 0) return idx >= 0;
    if (idx < 0) return false;
    return value > o.value || (value == o.value && idx < o.idx);
  }
};

SseSolution solve_bsse_impl(const StageGame& g, bool parallel) {
  check_game(g);
  const int nt = g.num_types();
  std::vector<int> sizes(nt);
  std::int64_t total = 1;
  for (int i = 0; i < nt; ++i) total *= sizes[i] = g.num_follower_actions(i);

  Candidate best;
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel
    {
      Candidate local;
      std::vector<int> js(nt);
#pragma omp for schedule(dynamic, 16)
      for (std::int64_t idx = 0; idx < total; ++idx) {
        decode_profile(idx, sizes, js);
        LpSolution sol = profile_lp(g, js);
        if (sol.status != LpStatus::optimal) continue;
        Candidate c{sol.value, idx};
        if (c.beats(local)) local = c;
      }
#pragma omp critical
      if (local.beats(best)) best = local;
    }
#else
    parallel = false;
#endif
  }
  if (!parallel) {
    std::vector<int> js(nt);
    for (std::int64_t idx = 0; idx < total; ++idx) {
      decode_profile(idx, sizes, js);
      LpSolution sol = profile_lp(g, js);
      if (sol.status != LpStatus::optimal) continue;
      Candidate c{sol.value, idx};
      if (c.beats(best)) best = c;
    }
  }
  if (best.idx < 0)
    throw std::runtime_error("no feasible response profile in stage game");

  // Re-solve the winner once so both execution modes emit identical bits.
  SseSolution out;
  out.responses.resize(nt);
  decode_profile(best.idx, sizes, out.responses);
  LpSolution sol = profile_lp(g, out.responses);
  out.x = sol.point;
  out.v_leader = sol.value;
  out.v_followers.resize(nt);
  for (int i = 0; i < nt; ++i) {
    const Matrix& f = g.follower_matrices[i];
    double v = 0.0;
    for (int d = 0; d < f.rows; ++d) v += out.x[d] * f(d, out.responses[i]);
    out.v_followers[i] = v;
  }
  return out;
}

}  // namespace

SseSolution solve_bsse(const StageGame& game, Exec mode) {
  return solve_bsse_impl(game, mode == Exec::parallel);
}

SseSolution solve_bsse_serial(const StageGame& game) {
  return solve_bsse_impl(game, false);
}

int best_response(const Matrix& follower, const std::vector<double>& x,
                  std::vector<int>* tie_set, double tol) {
  if (static_cast<int>(x.size()) != follower.rows)
    throw std::invalid_argument("mix length does not match matrix rows");
  if (follower.cols == 0)
    throw std::invalid_argument("best response over empty action set");
  std::vector<double> vals(follower.cols, 0.0);
  for (int k = 0; k < follower.cols; ++k)
    for (int d = 0; d < follower.rows; ++d) vals[k] += x[d] * follower(d, k);
  int arg = 0;
  for (int k = 1; k < follower.cols; ++k)
    if (vals[k] > vals[arg]) arg = k;
  if (tie_set) {
    tie_set->clear();
    for (int k = 0; k < follower.cols; ++k)
      if (vals[k] >= vals[arg] - tol) tie_set->push_back(k);
    arg = (*tie_set)[0];
  }
  return arg;
}

StageGame harsanyi_transform(const StageGame& g) {
  check_game(g);
  const int nt = g.num_types();
  const int nd = g.num_leader_actions();
  std::vector<int> sizes(nt);
  std::int64_t total = 1;
  for (int i = 0; i < nt; ++i) total *= sizes[i] = g.num_follower_actions(i);

  StageGame out;
  out.theta = {1.0};
  Matrix leader(nd, static_cast<int>(total));
  Matrix follower(nd, static_cast<int>(total));
  std::vector<int> js(nt);
  for (std::int64_t m = 0; m < total; ++m) {
    decode_profile(m, sizes, js);
    for (int d = 0; d < nd; ++d) {
      double l = 0.0, f = 0.0;
      for (int i = 0; i < nt; ++i) {
        l += g.theta[i] * g.leader_matrices[i](d, js[i]);
        f += g.theta[i] * g.follower_matrices[i](d, js[i]);
      }
      leader(d, static_cast<int>(m)) = l;
      follower(d, static_cast<int>(m)) = f;
    }
  }
  out.leader_matrices.push_back(std::move(leader));
  out.follower_matrices.push_back(std::move(follower));
  return out;
}

MaximinSolution solve_maximin(const Matrix& leader) {
  if (leader.rows == 0 || leader.cols == 0)
    throw std::invalid_argument("maximin over empty matrix");
  const int nd = leader.rows;
  const double ninf = -std::numeric_limits<double>::infinity();
  LinearProgram lp;
  lp.objective.assign(nd + 1, 0.0);
  lp.objective[nd] = 1.0;  // the guaranteed value
  lp.lower_bounds.assign(nd + 1, 0.0);
  lp.lower_bounds[nd] = ninf;
  std::vector<double> simplex(nd + 1, 1.0);
  simplex[nd] = 0.0;
  lp.add_row(std::move(simplex), '=', 1.0);
  for (int k = 0; k < leader.cols; ++k) {
    std::vector<double> row(nd + 1, 0.0);
    for (int d = 0; d < nd; ++d) row[d] = leader(d, k);
    row[nd] = -1.0;
    lp.add_row(std::move(row), '>', 0.0);
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal)
    throw std::runtime_error("maximin LP failed");
  MaximinSolution out;
  out.x.assign(sol.point.begin(), sol.point.begin() + nd);
  out.value = sol.value;
  return out;
}

namespace {

double mix_value(const Matrix& m, const std::vector<double>& x,
                 const std::vector<double>& y) {
  double v = 0.0;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) v += x[i] * m(i, j) * y[j];
  return v;
}

}  // namespace

NashSolution solve_nash(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("bimatrix shape mismatch");
  const int m = a.rows, n = a.cols;
  if (m == 0 || n == 0) throw std::invalid_argument("empty bimatrix game");
  if (m > 8 || n > 8)
    throw std::invalid_argument("support enumeration limited to 8x8 games");

  auto bits = [](unsigned mask, int width) {
    std::vector<int> out;
    for (int k = 0; k < width; ++k)
      if (mask & (1u << k)) out.push_back(k);
    return out;
  };

  for (int total = 2; total <= m + n; ++total) {
    for (unsigned sx = 1; sx < (1u << m); ++sx) {
      const int cx = __builtin_popcount(sx);
      if (cx >= total) continue;
      for (unsigned sy = 1; sy < (1u << n); ++sy) {
        if (cx + __builtin_popcount(sy) != total) continue;
        const std::vector<int> rows = bits(sx, m);
        const std::vector<int> cols = bits(sy, n);
        const int nr = static_cast<int>(rows.size());
        const int nc = static_cast<int>(cols.size());
        // Variables: x over rows, y over cols, then v_row, v_col (free).
        const int nv = nr + nc + 2;
        const double ninf = -std::numeric_limits<double>::infinity();
        LinearProgram lp;
        lp.objective.assign(nv, 0.0);
        lp.lower_bounds.assign(nv, 0.0);
        lp.lower_bounds[nv - 2] = ninf;
        lp.lower_bounds[nv - 1] = ninf;

        std::vector<double> row(nv, 0.0);
        for (int i = 0; i < nr; ++i) row[i] = 1.0;
        lp.add_row(row, '=', 1.0);
        row.assign(nv, 0.0);
        for (int j = 0; j < nc; ++j) row[nr + j] = 1.0;
        lp.add_row(row, '=', 1.0);

        for (int i = 0; i < m; ++i) {
          row.assign(nv, 0.0);
          for (int j = 0; j < nc; ++j) row[nr + j] = a(i, cols[j]);
          row[nv - 2] = -1.0;
          lp.add_row(row, (sx >> i) & 1u ? '=' : '<', 0.0);
        }
        for (int j = 0; j < n; ++j) {
          row.assign(nv, 0.0);
          for (int i = 0; i < nr; ++i) row[i] = b(rows[i], j);
          row[nv - 1] = -1.0;
          lp.add_row(row, (sy >> j) & 1u ? '=' : '<', 0.0);
        }

        LpSolution sol = solve_lp(lp);
        if (sol.status != LpStatus::optimal) continue;

        NashSolution out;
        out.x.assign(m, 0.0);
        out.y.assign(n, 0.0);
        for (int i = 0; i < nr; ++i) out.x[rows[i]] = sol.point[i];
        for (int j = 0; j < nc; ++j) out.y[cols[j]] = sol.point[nr + j];
        out.v_row = mix_value(a, out.x, out.y);
        out.v_col = mix_value(b, out.x, out.y);

        double best_row = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
          double v = 0.0;
          for (int j = 0; j < n; ++j) v += a(i, j) * out.y[j];
          best_row = std::max(best_row, v);
        }
        double best_col = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
          double v = 0.0;
          for (int i = 0; i < m; ++i) v += b(i, j) * out.x[i];
          best_col = std::max(best_col, v);
        }
        if (best_row - out.v_row <= 1e-8 && best_col - out.v_col <= 1e-8)
          return out;
      }
    }
  }
  throw std::runtime_error("support enumeration found no equilibrium");
}

}  // namespace bsmg
