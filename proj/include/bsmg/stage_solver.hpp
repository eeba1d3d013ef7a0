#pragma once

#include <vector>

#include "bsmg/game.hpp"

namespace bsmg {

struct SseSolution {
  std::vector<double> x;       // leader commitment
  std::vector<int> responses;  // induced pure response per type
  double v_leader = 0.0;
  std::vector<double> v_followers;
};

// Exact strong Stackelberg equilibrium: one LP per joint pure-response
// profile, maximizing the leader's expected payoff subject to each type
// preferring its assigned response. Exact value ties resolve to the
// lexicographically smallest profile, so both modes return identical bits.
SseSolution solve_bsse(const StageGame& game, Exec mode = Exec::parallel);
SseSolution solve_bsse_serial(const StageGame& game);

// Follower argmax against a leader mix. Ties break to the smallest index;
// tie_set, when given, collects every column within tol of the best.
int best_response(const Matrix& follower, const std::vector<double>& x,
                  std::vector<int>* tie_set = nullptr, double tol = 1e-9);

// Collapses the attacker types into a single follower whose actions are the
// lexicographic cross product of the per-type sets and whose payoffs are
// theta-expectations. For strictly positive theta the leader's equilibrium
// value is unchanged.
StageGame harsanyi_transform(const StageGame& game);

struct MaximinSolution {
  std::vector<double> x;
  double value = 0.0;
};

// Leader's security value for one payoff matrix, as a single LP.
MaximinSolution solve_maximin(const Matrix& leader);

struct NashSolution {
  std::vector<double> x;
  std::vector<double> y;
  double v_row = 0.0;
  double v_col = 0.0;
};

// Support enumeration for bimatrix games up to 8x8. Supports are scanned in
// a fixed order (increasing total size, lexicographic within a size) and the
// first solution passing a 1e-8 regret check is returned.
NashSolution solve_nash(const Matrix& row_payoff, const Matrix& col_payoff);

}  // namespace bsmg
