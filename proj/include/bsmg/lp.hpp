#pragma once

#include <vector>

namespace bsmg {

// maximize objective . x
// subject to   coeffs . x <= rhs   (dir '<')
//              coeffs . x >= rhs   (dir '>')
//              coeffs . x == rhs   (dir '=')
//              x[j] >= lower_bounds[j]   (-infinity marks a free variable;
//                                         an empty vector means all zeros)
struct LinearProgram {
  struct Row {
    std::vector<double> coeffs;
    double rhs = 0.0;
    char dir = '<';
  };

  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<double> lower_bounds;

  int num_vars() const { return static_cast<int>(objective.size()); }
  void add_row(std::vector<double> coeffs, char dir, double rhs) {
    rows.push_back({std::move(coeffs), rhs, dir});
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> point;
  double value = 0.0;
};

// Dense two-phase simplex with Bland's anti-cycling rule. Optimal points
// satisfy every constraint within 1e-9 (relative to the row scale) and
// optimality within 1e-7.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace bsmg
