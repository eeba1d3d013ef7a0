#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsmg/game.hpp"
#include "bsmg/spec_io.hpp"

namespace bsmg {

struct EnvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepOutcome {
  double r_defender = 0.0;
  double r_attacker = 0.0;
  int next_state = 0;
};

struct ActionSets {
  std::vector<std::string> defender;
  std::vector<std::vector<std::string>> attacker;  // one list per type
};

enum class Exposure { public_api, oracle_privileged };

// Simulator for one game instance. States, actions and types are addressed
// by their positions in the lists returned by get_states() and get_actions()
// (unions across states, in first-appearance order). Handles built with
// Exposure::public_api never reveal transition or utility tables: rewards
// and successor states only come out of act().
class Environment {
 public:
  Environment(GameSpec spec, Exposure exposure, std::uint64_t seed);

  const std::vector<std::string>& get_states() const { return spec_.states; }
  int get_start_state();
  const ActionSets& get_actions() const { return actions_; }
  bool is_end(int s) const;
  StepOutcome act(int s, int d_action, int a_action, int type);

  bool defender_available(int s, int d_action) const;
  bool attacker_available(int s, int type, int a_action) const;

  int num_types() const { return spec_.num_types(); }
  const std::vector<std::string>& type_names() const {
    return spec_.attacker_types;
  }
  const std::vector<double>& type_distribution(int s) const;
  double discount() const { return spec_.discount; }
  const std::vector<int>& start_states() const { return start_set_; }
  void override_start_states(const std::vector<int>& states);
  void reseed(std::uint64_t seed) { rng_.seed(seed); }

  // Planning access; throws EnvError on public handles.
  const GameSpec& spec_of() const;

 private:
  GameSpec spec_;
  Exposure exposure_;
  std::mt19937_64 rng_;
  ActionSets actions_;
  std::vector<int> start_set_;
  // union action index -> state-local index, -1 where unavailable
  std::vector<std::vector<int>> defender_local_;
  std::vector<std::vector<std::vector<int>>> attacker_local_;  // [s][i][a]
};

// Generic wrapper around any valid instance.
Environment make_env(GameSpec spec, Exposure exposure, std::uint64_t seed);

// Web-app configuration game: defender actions are the configurations
// themselves. variant "plain" demands deterministic moves to the chosen
// configuration; "threshold" rebuilds the kernel so a switch from s to c
// succeeds with probability 1 - min(1, cost(s, c) / cost_max) and otherwise
// stays put. An empty variant defers to the instance's env block.
Environment make_webapp_env(const std::string& path, const std::string& variant,
                            Exposure exposure, std::uint64_t seed);

// Intrusion-detection game: single attacker type, a no-op defender action
// everywhere, and exactly one terminal state reachable from every start.
Environment make_ids_env(const std::string& path, Exposure exposure,
                         std::uint64_t seed);

// Reads the instance's env block and dispatches to the matching wrapper.
Environment load_env(const std::string& path, Exposure exposure,
                     std::uint64_t seed);

}  // namespace bsmg
