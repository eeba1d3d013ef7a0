#pragma once

#include <vector>

#include "bsmg/game.hpp"

namespace bsmg {

struct BackupResult {
  QTables q;
  ValueFunctions values;
  StrategyProfile profile;
};

// One exact sweep: discounted lookahead Q from v, then a fresh stage
// equilibrium at every non-terminal state. Terminal states keep zero values
// and a point mass on the first defender action.
BackupResult bellman_backup(const GameSpec& spec, const ValueFunctions& v,
                            Exec mode = Exec::parallel);

struct PlanResult {
  StrategyProfile profile;
  ValueFunctions values;
  QTables q;
  int iterations = 0;
  bool converged = false;
  std::vector<double> deltas;  // sup-norm change per sweep
};

// Fixed-point iteration of the backup operator starting from zero values.
// Stops once the sup-norm change drops to tol or max_iter sweeps elapse.
PlanResult value_iteration(const GameSpec& spec, double tol = 1e-6,
                           int max_iter = 1000, Exec mode = Exec::parallel);

}  // namespace bsmg
