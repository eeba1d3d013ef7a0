#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bsmg/env.hpp"
#include "bsmg/game.hpp"

namespace bsmg {

enum class AgentKind { bssq, urs, bexpq, nashq, sopt };

AgentKind agent_from_name(const std::string& name);
std::string agent_name(AgentKind kind);

enum class AlphaSchedule { constant, visit_decay };

struct LearnerConfig {
  AgentKind agent = AgentKind::bssq;
  int episodes = 100;
  int max_episode_len = 10;
  double alpha = 0.06;
  AlphaSchedule alpha_schedule = AlphaSchedule::constant;
  // visit_decay uses alpha = 1 / (1 + alpha_decay_k * visits(s,i,d,a)).
  double alpha_decay_k = 1.0;
  double gamma = 0.8;
  double epsilon_start = 0.1;
  double epsilon_end = 0.05;
  std::uint64_t seed = 0;
  int record_every = 1;
};

struct LearningCurve {
  std::vector<int> episodes;                    // recorded episode numbers
  std::vector<std::vector<double>> v_defender;  // [record][state]
  std::vector<std::vector<std::vector<double>>> leader;  // [record][state][d]
};

struct LearnResult {
  StrategyProfile profile;
  QTables q;
  ValueFunctions values;
  LearningCurve curve;
};

// Temporal-difference step toward r + gamma * v_next.
inline double q_update(double q, double r, double v_next, double alpha,
                       double gamma) {
  return (1.0 - alpha) * q + alpha * (r + gamma * v_next);
}

// With probability eps a uniform action, otherwise a draw from x.
int epsilon_greedy_sample(const std::vector<double>& x, double eps,
                          std::mt19937_64& rng);

// Pure best response for one type given attacker Q estimates at a state.
int attacker_best_response(const Matrix& q_attacker,
                           const std::vector<double>& x);

// The commitment URS plays: uniform over the defender actions everywhere.
StrategyProfile urs_policy(const Environment& env);

// Single-stage commitment from utilities averaged over states, installed at
// every state. Needs action sets shared across states.
StrategyProfile sopt_policy(const GameSpec& spec);

// On-line learners. All of them keep defender and attacker Q tables updated
// from played cells only and bootstrap with their own value estimates; they
// differ in how the defender strategy is refreshed after each step.
LearnResult bssq_learn(Environment& env, const LearnerConfig& cfg);
LearnResult bexpq_learn(Environment& env, const LearnerConfig& cfg);
LearnResult nashq_learn(Environment& env, const LearnerConfig& cfg);
LearnResult urs_learn(Environment& env, const LearnerConfig& cfg);
LearnResult sopt_learn(Environment& env, const GameSpec& spec,
                       const LearnerConfig& cfg);

// Dispatch on cfg.agent. sopt needs the game itself: pass it, or use an
// oracle-privileged environment.
LearnResult run_agent(Environment& env, const LearnerConfig& cfg,
                      const GameSpec* game = nullptr);

// Monte-Carlo evaluation of a fixed profile: discounted defender return from
// every state, averaged over episodes, attacker locked to the profile's
// responses. Deterministic in seed (the environment is reseeded from it).
std::vector<double> evaluate_policy(Environment& env,
                                    const StrategyProfile& profile,
                                    int episodes, int horizon,
                                    std::uint64_t seed);

}  // namespace bsmg
