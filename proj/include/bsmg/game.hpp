#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "bsmg/matrix.hpp"

namespace bsmg {

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A Bayesian Stackelberg Markov Game: one defender (leader) against an
// attacker drawn each step from a state-dependent distribution over types.
// Identifiers live in the name lists; everything else is index-based.
struct GameSpec {
  std::vector<std::string> states;
  std::vector<std::string> attacker_types;
  // theta[s][i]: probability that the attacker at state s is of type i.
  std::vector<std::vector<double>> theta;
  std::vector<std::vector<std::string>> defender_actions;  // [s][d]
  std::vector<std::vector<std::vector<std::string>>> attacker_actions;  // [s][i][a]
  // transitions[s][i][d][a]: distribution over next states (length |S|).
  std::vector<std::vector<std::vector<std::vector<std::vector<double>>>>> transitions;
  // Payoff matrices per state and type; rows are defender actions, columns
  // the type's attacker actions.
  std::vector<std::vector<Matrix>> u_defender;  // [s][i]
  std::vector<std::vector<Matrix>> u_attacker;  // [s][i]
  double discount = 0.9;
  std::vector<int> start_states;
  std::vector<int> terminal_states;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_types() const { return static_cast<int>(attacker_types.size()); }
  int num_defender_actions(int s) const {
    return static_cast<int>(defender_actions[s].size());
  }
  int num_attacker_actions(int s, int i) const {
    return static_cast<int>(attacker_actions[s][i].size());
  }
  int state_index(const std::string& name) const;  // -1 if unknown
  bool is_terminal(int s) const;
  bool is_start(int s) const;
};

// One-shot Bayesian game faced by the leader at a single state: one payoff
// matrix pair per attacker type plus the type distribution.
struct StageGame {
  std::vector<Matrix> leader_matrices;
  std::vector<Matrix> follower_matrices;
  std::vector<double> theta;

  int num_types() const { return static_cast<int>(theta.size()); }
  int num_leader_actions() const {
    return leader_matrices.empty() ? 0 : leader_matrices[0].rows;
  }
  int num_follower_actions(int i) const { return follower_matrices[i].cols; }
};

// Q estimates for both sides, indexed like the utility tensors.
struct QTables {
  std::vector<std::vector<Matrix>> q_defender;  // [s][i](d, a)
  std::vector<std::vector<Matrix>> q_attacker;

  static QTables zeros(const GameSpec& spec);
};

struct ValueFunctions {
  std::vector<double> v_defender;               // [s]
  std::vector<std::vector<double>> v_attacker;  // [s][i]

  static ValueFunctions zeros(const GameSpec& spec);
};

// Stationary commitment: a mixed defender strategy per state and the pure
// response each attacker type is steered to.
struct StrategyProfile {
  std::vector<std::vector<double>> leader;  // [s][d]
  std::vector<std::vector<int>> followers;  // [s][i]

  static StrategyProfile uniform(const GameSpec& spec);
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Structural and stochastic consistency checks: simplex rows within 1e-9,
// matching tensor shapes, index ranges, nonempty action sets, start states
// disjoint from terminal states, discount in [0, 1).
ValidationReport validate(const GameSpec& spec);

// Stage game at state s built from Q estimates.
StageGame build_stage_game(const GameSpec& spec, const QTables& q, int s);

// Stage game at state s built from immediate utilities.
StageGame immediate_stage_game(const GameSpec& spec, int s);

}  // namespace bsmg
